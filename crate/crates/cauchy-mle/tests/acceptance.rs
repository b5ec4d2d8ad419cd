//! Acceptance gate: eight shipping criteria with pinned tolerances and
//! runtime budgets. Each test is one criterion; all must stay green.
//!
//! Reference values are the published estimates for these benchmark
//! samples; tolerances are part of the contract, not advisory.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cauchy_mle::iterate::{fit_circular, fit_iterative, pseudo_hyperbolic, q_map, IterationTrace};
use cauchy_mle::model::{mobius, mobius_inverse};
use cauchy_mle::oracle::{
    fd_score_check, grid_mle, newton_raphson_baseline, sample_cauchy, GridSpec, NewtonOutcome,
};
use cauchy_mle::{
    build_rn, cdf_symmetry_residuals, construct_sample_with_position, contraction_check,
    emit_coefficients, fit_algebraic, fit_n3, fit_n4, likelihood_residuals, relative_position,
    stability_probe, starting_point, CircularSample, EmitFormat, Sample, UpperHalfPoint,
};

const SEVEN_POINT: [f64; 7] = [-8.0, -5.0, -3.0, -1.0, 2.0, 7.0, 10.0];
const FLAT_FOUR: [f64; 4] = [-10065.0, -8678.0, -6.0, 0.0];
const HUGE_SIX: [f64; 6] = [-1e7, -9e6, 0.0, 1.0, 10.0, 1e5];
const CLUSTER_FIFTEEN: [f64; 15] = [
    -1.4, -0.44, -0.3, -0.24, -0.22, -0.13, -0.05, 0.06, 0.1, 0.18, 0.2, 0.39, 0.48, 0.63, 1.01,
];

fn sample(values: &[f64]) -> Sample {
    Sample::new(values.to_vec()).expect("benchmark sample is valid")
}

/// Orbit value after exactly m applications of the double step. When the
/// orbit hit a bitwise fixed point earlier, every later iterate equals the
/// last stored one.
fn snapshot(trace: &IterationTrace, m: usize) -> Complex64 {
    trace
        .iterates
        .get(m)
        .or_else(|| trace.iterates.last())
        .copied()
        .expect("orbit is nonempty")
}

#[test]
fn criterion_1_seven_point_sample_all_routes() {
    let clock = Instant::now();
    let s = sample(&SEVEN_POINT);

    let (theta, trace) = fit_iterative(&s, None, 1e-12, 1_000_000).expect("fit");
    assert!((theta.theta() - Complex64::new(-1.404384, 3.909214)).norm() <= 1e-5);

    assert!(trace.iterates.len() > 3, "orbit long enough to snapshot");
    let third = snapshot(&trace, 3);
    assert!((third - Complex64::new(-1.404858, 3.913066)).norm() <= 1e-5);

    let alg = fit_algebraic(&s, 1e-8).expect("algebraic fit");
    assert_eq!(alg.degree, 30);
    assert!((alg.chosen.theta() - Complex64::new(-1.4043843, 3.909214)).norm() <= 1e-6);

    assert!(clock.elapsed() < Duration::from_secs(1), "criterion 1 budget");
}

#[test]
fn criterion_2_flat_sample_closed_form_and_slow_orbit() {
    let clock = Instant::now();
    let s = sample(&FLAT_FOUR);

    let closed = fit_n4(&s).expect("closed form");
    assert!((closed.mu() - (-43.3525)).abs() <= 1e-3);
    assert!((closed.sigma() - 611.8279).abs() <= 1e-3);

    // the orbit is genuinely slow here: snapshots along 10^5 double steps
    let (_, trace) = fit_iterative(&s, None, 0.0, 100_000).expect("orbit");
    let table = [
        (100, Complex64::new(-1339.32, 3784.915)),
        (1_000, Complex64::new(-197.044, 1382.602)),
        (10_000, Complex64::new(-45.0412, 625.3293)),
        (100_000, Complex64::new(-43.3525, 611.8279)),
    ];
    for (m, reference) in table {
        let got = snapshot(&trace, m);
        assert!(
            (got - reference).norm() <= 1e-3 * reference.norm(),
            "snapshot at {} drifted: {} vs {}",
            m,
            got,
            reference
        );
    }

    let report = relative_position(&s, &closed);
    assert!((report.xi - Complex64::new(0.9913855, 0.1215753)).norm() <= 1e-4);
    assert!((report.relative_distance - 0.0012).abs() <= 1e-4);

    assert!(clock.elapsed() < Duration::from_secs(5), "criterion 2 budget");
}

#[test]
fn criterion_3_large_magnitude_sample_and_newton_failure() {
    let clock = Instant::now();
    let s = sample(&HUGE_SIX);

    let alg = fit_algebraic(&s, 1e-8).expect("algebraic fit");
    assert_eq!(alg.degree, 20);
    assert!((alg.chosen.theta() - Complex64::new(6.7468, 971.5610)).norm() <= 1e-3);

    let (_, trace) = fit_iterative(&s, None, 0.0, 100_000).expect("orbit");
    let late = snapshot(&trace, 100_000);
    assert!((late - Complex64::new(6.7468, 971.561)).norm() <= 1e-2);

    let newton = newton_raphson_baseline(&s, &starting_point(&s), 1_000);
    assert!(
        matches!(newton, NewtonOutcome::Diverged { .. }),
        "the classical baseline must fail here"
    );

    assert!(clock.elapsed() < Duration::from_secs(30), "criterion 3 budget");
}

#[test]
fn criterion_4_clustered_sample_start_and_early_snapshots() {
    let s = sample(&CLUSTER_FIFTEEN);

    let start = starting_point(&s);
    assert_eq!(start.mu(), 0.06, "median must come out exact");
    assert_eq!(start.sigma(), 0.525, "IQR must come out exact");

    let (theta, trace) = fit_iterative(&s, None, 1e-12, 1_000_000).expect("fit");
    assert!((snapshot(&trace, 2) - Complex64::new(0.0269864, 0.2618557)).norm() <= 1e-6);
    assert!((snapshot(&trace, 4) - Complex64::new(0.0267463, 0.2613197)).norm() <= 1e-6);
    assert!((theta.theta() - Complex64::new(0.0267456, 0.2613)).norm() <= 5e-5);
}

#[test]
fn criterion_5_exact_polynomial_goldens() {
    let skew = sample(&[-3.0, -1.0, 2.0, 3.0, 4.0]);
    let fit = fit_algebraic(&skew, 1e-8).expect("fit");
    assert_eq!(fit.degree, 12);
    assert_eq!(
        emit_coefficients(&fit, EmitFormat::Integers),
        "1625 -21900 60080 497120 -3872917 8349308 7475139 -60328870 68240568 \
         73101060 -188037099 63230706 45440028"
    );

    let symmetric = sample(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
    let sym_fit = fit_algebraic(&symmetric, 1e-8).expect("fit");
    assert_eq!(
        emit_coefficients(&sym_fit, EmitFormat::Integers),
        "125 0 -1750 0 4550 0 -725 0 -6260 0 3280 0 -192"
    );
    // σ̂ = √((√(53/5) − 1)/2) exactly, location exactly zero
    let expected = Complex64::new(0.0, (((53.0f64 / 5.0).sqrt() - 1.0) / 2.0).sqrt());
    assert!((sym_fit.chosen.theta() - expected).norm() <= 1e-10);
}

#[test]
fn criterion_6_cross_solver_agreement_on_seeded_samples() {
    let clock = Instant::now();
    let truth = UpperHalfPoint::new(0.0, 1.0).expect("unit scale");

    for seed in 0..100u64 {
        let n = 3 + (seed as usize % 5);
        let s = sample_cauchy(&truth, n, 0x5EED_0000 + seed).expect("seeded sample");
        let spread = s.max() - s.min();

        let (iter, trace) = fit_iterative(&s, None, 1e-13, 1_000_000).expect("fit");
        assert!(trace.converged, "seed {} failed to converge", seed);
        let alg = fit_algebraic(&s, 1e-6).expect("algebraic fit");

        let mut estimates = vec![iter.theta(), alg.chosen.theta()];
        if n == 3 {
            estimates.push(fit_n3(&s).expect("closed form").theta());
        }
        if n == 4 {
            estimates.push(fit_n4(&s).expect("closed form").theta());
        }
        for (i, a) in estimates.iter().enumerate() {
            for b in estimates.iter().skip(i + 1) {
                // scale-free agreement plus a spread-scaled absolute bound
                assert!(
                    pseudo_hyperbolic(*a, *b) <= 1e-8,
                    "seed {}: {} vs {}",
                    seed,
                    a,
                    b
                );
                assert!((a - b).norm() <= 1e-8 * (1.0 + spread));
            }
        }

        let grid = grid_mle(&s, &GridSpec::default_for(&s));
        assert!((grid.mu() - iter.mu()).abs() <= 1e-3 * (1.0 + spread));
        assert!((grid.sigma() - iter.sigma()).abs() <= 1e-3 * (1.0 + spread));
    }

    assert!(clock.elapsed() < Duration::from_secs(120), "criterion 6 budget");
}

#[test]
fn criterion_7_invariant_battery() {
    let truth = UpperHalfPoint::new(0.0, 1.0).expect("unit scale");
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_9917);

    // q sends H down, and equals the conjugated disc mean pulled back
    for k in 0..100u64 {
        let n = 3 + (k as usize % 6);
        let s = sample_cauchy(&truth, n, 0xAB_0000 + k).expect("seeded sample");
        let z = Complex64::new(rng.random_range(-20.0..20.0), rng.random_range(0.05..10.0));
        let qz = q_map(&s, z).expect("no pole off the axis");
        assert!(qz.im < 0.0);

        let zp = UpperHalfPoint::from_complex(z).expect("upper half point");
        let mean = s
            .values()
            .iter()
            .map(|&x| mobius(&zp, Complex64::new(x, 0.0)))
            .sum::<Complex64>()
            / n as f64;
        let pulled = mobius_inverse(&zp, mean).conj();
        assert!((qz - pulled).norm() <= 1e-12 * (1.0 + qz.norm()));
    }

    for k in 0..20u64 {
        let n = 3 + (k as usize % 6);
        let s = sample_cauchy(&truth, n, 0xCD_0000 + k).expect("seeded sample");
        let (theta, trace) = fit_iterative(&s, None, 1e-13, 1_000_000).expect("fit");
        assert!(trace.converged);

        // distance to the fixed point strictly decreases along the orbit
        let mut previous = f64::INFINITY;
        for &z in &trace.iterates {
            let d = pseudo_hyperbolic(z, theta.theta());
            if d <= 1e-10 {
                break;
            }
            assert!(d < previous, "orbit distance grew at seed {}", k);
            previous = d;
        }

        assert!(contraction_check(&s, &theta) < 1.0);
        assert!(relative_position(&s, &theta).xi.norm() <= 1.0 + 1e-12);

        let r = likelihood_residuals(&s, &theta);
        assert!(r.log_derivative <= 1e-8);
        assert!(r.mean_image <= 1e-8);
        assert!(r.score_mu <= 1e-8);
        assert!(r.score_sigma <= 1e-8);
    }

    // distribution-level symmetry at the exact closed forms
    for k in 0..20u64 {
        for n in [3usize, 4] {
            let s = sample_cauchy(&truth, n, 0xEF_0000 + k).expect("seeded sample");
            let closed = if n == 3 {
                fit_n3(&s).expect("closed form")
            } else {
                fit_n4(&s).expect("closed form")
            };
            let residuals = cdf_symmetry_residuals(&s, &closed).expect("small n");
            assert!(residuals.iter().all(|&r| r <= 1e-9));
        }
    }

    // tiny input perturbations move the estimate by a bounded amount
    for k in 0..10u64 {
        let s = sample_cauchy(&truth, 5 + (k as usize % 3), 0x57AB_0000 + k).expect("sample");
        let moved = stability_probe(&s, 1e-8).expect("probe");
        assert!(moved < 1e-4, "seed {} moved {}", k, moved);
    }

    // finite-difference score error shrinks quadratically with the step
    for k in 0..10u64 {
        let s = sample_cauchy(&truth, 4 + (k as usize % 4), 0xFD_0000 + k).expect("sample");
        let (fit, _) = fit_iterative(&s, None, 1e-13, 1_000_000).expect("fit");
        let off = UpperHalfPoint::new(fit.mu() + 0.3 * fit.sigma(), fit.sigma() * 1.7)
            .expect("still in H");
        let h = 1e-3 * off.sigma();
        let fine = fd_score_check(&s, &off, h);
        let coarse = fd_score_check(&s, &off, 2.0 * h);
        assert!(fine.0 <= coarse.0 / 2.5 + 1e-11);
        assert!(fine.1 <= coarse.1 / 2.5 + 1e-11);
    }

    // position-targeted construction round-trips
    let mut built = 0;
    while built < 20 {
        let xi = Complex64::new(
            rng.random_range(-0.9..0.9),
            rng.random_range(0.05..0.85),
        );
        if xi.norm() > 0.9 {
            continue;
        }
        let n = [4, 6, 8][built % 3];
        let s = construct_sample_with_position(xi, n).expect("constructible");
        let (theta, _) = fit_iterative(&s, None, 1e-13, 1_000_000).expect("fit");
        assert!((relative_position(&s, &theta).xi - xi).norm() <= 1e-8);
        built += 1;
    }
}

#[test]
fn criterion_8_circular_conjugation_and_fixed_point() {
    let truth = UpperHalfPoint::new(0.0, 1.0).expect("unit scale");
    let mut rng = ChaCha8Rng::seed_from_u64(0xC19C_0001);

    for k in 0..20u64 {
        let n = 4 + (k as usize % 5);
        let s = sample_cauchy(&truth, n, 0x0C1C_0000 + k).expect("seeded sample");
        let (theta, _) = fit_iterative(&s, None, 1e-13, 1_000_000).expect("fit");

        // transport the sample to the circle through an unrelated base point
        let base = UpperHalfPoint::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(0.5..2.0),
        )
        .expect("base point");
        let angles: Vec<f64> = s
            .values()
            .iter()
            .map(|&x| {
                let a = mobius(&base, Complex64::new(x, 0.0)).arg();
                if a < 0.0 {
                    a + std::f64::consts::TAU
                } else {
                    a
                }
            })
            .collect();
        let circ = CircularSample::new(angles).expect("distinct angles");
        let psi = fit_circular(&circ, 1e-13, 1_000_000).expect("disc fit");

        // the disc estimate is the transported half-plane estimate
        let transported = mobius(&base, theta.theta());
        assert!((psi - transported).norm() <= 1e-8, "seed {}", k);

        // and it is numerically a fixed point of the composed disc step
        let points: Vec<Complex64> = circ
            .angles()
            .iter()
            .map(|&a| Complex64::from_polar(1.0, a))
            .collect();
        let q_tilde = |w: Complex64| -> Complex64 {
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = Complex64::new(0.0, 0.0);
            for &e in &points {
                let inv = (e - w).finv();
                num += e * inv;
                den += inv;
            }
            num / den
        };
        assert!((psi - q_tilde(q_tilde(psi))).norm() <= 1e-10);
    }
}

#[test]
fn golden_polynomial_inputs_are_well_formed() {
    // guard against silent edits to the benchmark constants
    assert_eq!(sample(&SEVEN_POINT).n(), 7);
    assert_eq!(sample(&FLAT_FOUR).n(), 4);
    assert_eq!(sample(&HUGE_SIX).n(), 6);
    assert_eq!(sample(&CLUSTER_FIFTEEN).n(), 15);
    assert!(build_rn(&sample(&SEVEN_POINT)).is_ok());
}
