//! Browser bindings. Each operation takes the same plain text the CLI
//! accepts (whitespace/comma separated decimals or p/q rationals, '#'
//! comments) and returns one JSON string; failures come back as
//! {"error": "..."} so the page handles a single shape.

use std::fmt::Write;

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use cauchy_mle::{
    build_rn, density, emit_poly, fit_algebraic, fit_iterative, fit_n3, fit_n4,
    likelihood_residuals, relative_position, starting_point, EmitFormat, Error, Sample,
    UpperHalfPoint,
};

/// 17 significant digits: round-trips f64 exactly and parses as a JS number.
fn num(x: f64) -> String {
    format!("{:.16e}", x)
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn fail(message: impl std::fmt::Display) -> String {
    format!("{{\"error\": \"{}\"}}", escape(&message.to_string()))
}

fn complex_json(z: Complex64) -> String {
    format!("{{\"re\": {}, \"im\": {}}}", num(z.re), num(z.im))
}

fn numbers_json(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().copied().map(num).collect();
    format!("[{}]", parts.join(", "))
}

/// Thin every orbit to at most `cap` points, always keeping both ends.
fn thin(points: &[Complex64], cap: usize) -> Vec<Complex64> {
    if points.len() <= cap {
        return points.to_vec();
    }
    let last = points.len() - 1;
    let mut kept: Vec<Complex64> = (0..cap - 1)
        .map(|k| points[k * last / (cap - 1)])
        .collect();
    kept.push(points[last]);
    kept
}

/// Same route policy as the CLI's auto method: closed form for 3 or 4
/// distinct observations, otherwise the iteration, with the polynomial
/// route as fallback when the budget runs out on a small sample.
fn auto_fit(
    s: &Sample,
    max_iter: usize,
) -> Result<(UpperHalfPoint, &'static str, usize, bool), Error> {
    if (s.n() == 3 || s.n() == 4) && s.all_distinct() {
        let theta = if s.n() == 3 { fit_n3(s)? } else { fit_n4(s)? };
        return Ok((theta, "closed", 0, true));
    }
    let (theta, trace) = fit_iterative(s, None, 1e-12, max_iter)?;
    if trace.converged {
        return Ok((theta, "iterate", trace.iterations, true));
    }
    if s.n() <= 12 && s.all_distinct() {
        let fit = fit_algebraic(s, 1e-8)?;
        return Ok((fit.chosen, "poly", trace.iterations, true));
    }
    Ok((theta, "iterate", trace.iterations, false))
}

/// Fixed-point orbit of the composed step from the default start.
///
/// Returns the thinned trajectory together with the estimate, residuals,
/// and the sample's position diagnostics.
#[wasm_bindgen]
pub fn fit_trajectory(input: &str, max_iter: u32) -> String {
    let s = match Sample::parse(input) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let budget = (max_iter as usize).clamp(1, 1_000_000);
    let (theta, trace) = match fit_iterative(&s, None, 1e-12, budget) {
        Ok(hit) => hit,
        Err(e) => return fail(e),
    };
    let r = likelihood_residuals(&s, &theta);
    let pos = relative_position(&s, &theta);
    let orbit: Vec<String> = thin(&trace.iterates, 2048)
        .into_iter()
        .map(complex_json)
        .collect();
    format!(
        "{{\"values\": {}, \"start\": {}, \"trajectory\": [{}], \
         \"mu\": {}, \"sigma\": {}, \"iterations\": {}, \"converged\": {}, \
         \"residual\": {}, \"relative_position\": {}, \"relative_distance\": {}}}",
        numbers_json(s.values()),
        complex_json(starting_point(&s).theta()),
        orbit.join(", "),
        num(theta.mu()),
        num(theta.sigma()),
        trace.iterations,
        trace.converged,
        num(r.mean_image),
        complex_json(pos.xi),
        num(pos.relative_distance),
    )
}

/// Fitted density on a uniform grid spanning mu +- 8 sigma.
///
/// The route mirrors the CLI's auto policy; `points` is clamped to
/// [16, 4096] grid nodes.
#[wasm_bindgen]
pub fn density_curve(input: &str, points: u32) -> String {
    let s = match Sample::parse(input) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let (theta, method, iterations, converged) = match auto_fit(&s, 200_000) {
        Ok(hit) => hit,
        Err(e) => return fail(e),
    };
    let nodes = (points as usize).clamp(16, 4096);
    let x0 = theta.mu() - 8.0 * theta.sigma();
    let x1 = theta.mu() + 8.0 * theta.sigma();
    let step = (x1 - x0) / (nodes - 1) as f64;
    let mut xs = Vec::with_capacity(nodes);
    let mut pdf = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let x = x0 + step * k as f64;
        xs.push(x);
        pdf.push(density(x, &theta));
    }
    format!(
        "{{\"mu\": {}, \"sigma\": {}, \"method\": \"{}\", \"iterations\": {}, \
         \"converged\": {}, \"x\": {}, \"pdf\": {}, \"values\": {}}}",
        num(theta.mu()),
        num(theta.sigma()),
        method,
        iterations,
        converged,
        numbers_json(&xs),
        numbers_json(&pdf),
        numbers_json(s.values()),
    )
}

/// Exact defining polynomial plus its full root set.
///
/// Capped at 10 observations: the degree grows as n^2-3n+2 and exact
/// integer construction beyond that stops being interactive.
#[wasm_bindgen]
pub fn polynomial(input: &str) -> String {
    let s = match Sample::parse(input) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if s.n() > 10 {
        return fail("in-browser polynomial construction is capped at 10 observations");
    }
    let rn = match build_rn(&s) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let coeffs: Vec<String> = emit_poly(&rn, EmitFormat::Integers)
        .split(' ')
        .map(|c| format!("\"{}\"", c))
        .collect();
    let fit = match fit_algebraic(&s, 1e-8) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let chosen = fit.chosen.theta();
    let roots: Vec<String> = fit
        .roots
        .iter()
        .map(|r| {
            let selected = (r - chosen).norm() <= 1e-6 * (1.0 + chosen.norm());
            format!(
                "{{\"re\": {}, \"im\": {}, \"selected\": {}}}",
                num(r.re),
                num(r.im),
                selected
            )
        })
        .collect();
    format!(
        "{{\"degree\": {}, \"coefficients\": [{}], \"selected\": {}, \"roots\": [{}]}}",
        fit.degree,
        coeffs.join(", "),
        complex_json(chosen),
        roots.join(", ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parsed(text: &str) -> Value {
        serde_json::from_str(text).expect("valid JSON")
    }

    #[test]
    fn trajectory_reaches_the_known_fit() {
        let v = parsed(&fit_trajectory("-8 -5 -3 -1 2 7 10", 1_000_000));
        assert!((v["mu"].as_f64().unwrap() - (-1.404384)).abs() <= 1e-5);
        assert!((v["sigma"].as_f64().unwrap() - 3.909214).abs() <= 1e-5);
        assert_eq!(v["converged"], true);
        let orbit = v["trajectory"].as_array().unwrap();
        assert_eq!(orbit.len() as u64, v["iterations"].as_u64().unwrap() + 1);
        let last = orbit.last().unwrap();
        assert_eq!(last["re"], v["mu"]);
        assert_eq!(last["im"], v["sigma"]);
    }

    #[test]
    fn long_orbits_are_thinned_with_ends_kept() {
        let v = parsed(&fit_trajectory("-10065, -8678, -6, 0", 100_000));
        let orbit = v["trajectory"].as_array().unwrap();
        assert!(orbit.len() <= 2048);
        let last = orbit.last().unwrap();
        assert!((last["re"].as_f64().unwrap() - v["mu"].as_f64().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn density_grid_matches_the_closed_form_fit() {
        // odd node count puts x = mu exactly on the middle node
        let v = parsed(&density_curve("-10065, -8678, -6, 0", 65));
        assert_eq!(v["method"], "closed");
        assert!((v["mu"].as_f64().unwrap() - (-43.3525)).abs() <= 1e-3);
        let xs = v["x"].as_array().unwrap();
        let pdf = v["pdf"].as_array().unwrap();
        assert_eq!(xs.len(), 65);
        assert_eq!(pdf.len(), 65);
        // peak value of the density is 1/(pi*sigma) at x = mu
        let top = pdf
            .iter()
            .map(|p| p.as_f64().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let sigma = v["sigma"].as_f64().unwrap();
        assert!((top - 1.0 / (std::f64::consts::PI * sigma)).abs() <= 1e-9 * top);
    }

    #[test]
    fn polynomial_reports_the_golden_coefficients() {
        let v = parsed(&polynomial("-1 0 1"));
        assert_eq!(v["degree"], 2);
        let coeffs: Vec<&str> = v["coefficients"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap())
            .collect();
        assert_eq!(coeffs, ["3", "0", "1"]);
        let roots = v["roots"].as_array().unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(
            roots.iter().filter(|r| r["selected"] == true).count(),
            1
        );
    }

    #[test]
    fn errors_come_back_as_json() {
        let v = parsed(&fit_trajectory("1 2", 100));
        assert!(v["error"].as_str().unwrap().contains("3"));
        let v = parsed(&polynomial("0 0 1 2 3"));
        assert!(!v["error"].as_str().unwrap().is_empty());
        let v = parsed(&polynomial("1 2 3 4 5 6 7 8 9 10 11"));
        assert!(v["error"].as_str().unwrap().contains("capped"));
    }
}
