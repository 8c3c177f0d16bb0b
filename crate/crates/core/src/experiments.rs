//! End-to-end runs on distances from bounded functions to `SF_N`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fractions::{taylor_coefficients_of, PoleConfiguration};
use crate::norms::{norm_sq_quadrature, psi_norm_sq};
use crate::optimize::{distance_sq, distance_to_sfn, OptimizeOptions};
use crate::report::ExperimentReport;
use crate::thompson::{construct_poles, BoundedAnalyticFunction};
use crate::weights::{MomentCoefficients, Weight};

/// Desk-scale slack below `π/√3` for the lower-bound branch.
pub const LOWER_SLACK: f64 = 0.5;
/// Desk-scale half-width of the bracket around `π/√3`.
pub const LIMIT_SLACK: f64 = 0.3;
/// Target for the density branch: `‖f - h_N‖ < DENSITY_FRACTION · ‖f‖`.
pub const DENSITY_FRACTION: f64 = 0.1;
/// A density sequence may rise by this fraction over its running minimum.
pub const DECREASE_SLACK: f64 = 0.05;
/// Largest `N` at which the density run cross-checks against 2-D quadrature.
pub const CROSS_CHECK_MAX_N: usize = 32;

pub fn pi_over_sqrt3() -> f64 {
    PI / 3f64.sqrt()
}

fn ns_as_x(ns: &[usize]) -> Vec<f64> {
    ns.iter().map(|&n| n as f64).collect()
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::Usage("N values must be positive and non-empty".into()));
    }
    Ok(())
}

fn options_json(opts: &OptimizeOptions) -> serde_json::Value {
    serde_json::json!({
        "starts": opts.starts, "seed": opts.seed, "tol": opts.tol, "max_iterations": opts.max_iterations,
    })
}

/// Optimized distances from `f` to `SF_N` in `A²₁`, against `π/√3 - LOWER_SLACK`.
///
/// Finite optimization only gives upper estimates of the distance; the
/// report is consistent with, not a proof of, a uniform lower bound.
pub fn closure_lower_bound_check(
    f: &BoundedAnalyticFunction,
    ns: &[usize],
    opts: &OptimizeOptions,
) -> Result<ExperimentReport> {
    check_ns(ns)?;
    let g = Weight::power(1.0)?;
    let mut report = ExperimentReport::new(
        "closure_lower_bound",
        serde_json::json!({
            "f": f.taylor.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
            "weight": g.to_string(), "Ns": ns, "optimizer": options_json(opts), "slack": LOWER_SLACK,
        }),
    );
    let d_sq: Vec<f64> = ns
        .iter()
        .map(|&n| distance_to_sfn(f, n, &g, opts).map(|r| r.best_norm_sq))
        .collect::<Result<_>>()?;
    let limit = pi_over_sqrt3();
    report.reference("π/√3", limit, "closed form");
    report.reference("π²/3", limit * limit, "closed form");
    report.series("distance²", ns_as_x(ns), d_sq.clone());
    let d: Vec<f64> = d_sq.iter().map(|v| v.sqrt()).collect();
    report.series("distance", ns_as_x(ns), d.clone());
    for (&n, &v) in ns.iter().zip(&d) {
        report.at_least(
            format!("N={n}: distance ≥ π/√3 - {LOWER_SLACK}"),
            v,
            limit - LOWER_SLACK,
            0.0,
        );
    }
    if f.is_zero() {
        for (&n, &v) in ns.iter().zip(&d_sq) {
            let psi = psi_norm_sq(n, &g)?.value_sq;
            report.at_most(format!("N={n}: |distance² - ‖Ψ_N‖²|"), (v - psi).abs(), 0.0, 1e-9 * psi);
        }
    }
    let running_min = d_sq.iter().copied().fold(f64::INFINITY, f64::min);
    report.note(format!(
        "smallest distance² {running_min:.6} against π²/3 = {:.6}; consistent with a uniform lower bound, not a proof",
        limit * limit
    ));
    Ok(report.finish())
}

/// `‖f - h_N‖²_(g)` computed a second way: Taylor pairing for `⟨f, h⟩` and
/// 2-D quadrature of circle means for `‖h‖²`.
pub fn distance_sq_by_quadrature(f: &BoundedAnalyticFunction, c: &PoleConfiguration, g: &Weight) -> Result<f64> {
    let d = f.degree();
    let moments = MomentCoefficients::new(g, d)?;
    let h = taylor_coefficients_of(c.angles(), d);
    let cross: f64 = f
        .taylor
        .iter()
        .zip(&h)
        .zip(&moments.values)
        .map(|((a, b), m)| g.kappa * m * (a * b.conj()).re)
        .sum();
    let h_sq = norm_sq_quadrature(c, g)?.value_sq;
    Ok(f.norm_sq(g)?.value_sq - 2.0 * cross + h_sq)
}

/// `‖f - h_N‖_(g)` for the constructed `h_N`, for a weight with `g(t) = o(t)`.
pub fn closure_density_demo(f: &BoundedAnalyticFunction, g: &Weight, ns: &[usize]) -> Result<ExperimentReport> {
    check_ns(ns)?;
    if !g.is_little_o_of_t() {
        return Err(Error::Domain(format!("{g} is not o(t) at 0")));
    }
    if let Some(&n) = ns.iter().find(|&&n| n as f64 <= 2.0 * f.sup_bound_m) {
        return Err(Error::Monotonicity {
            n,
            two_m: 2.0 * f.sup_bound_m,
        });
    }
    let mut report = ExperimentReport::new(
        "closure_density",
        serde_json::json!({
            "f": f.taylor.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
            "weight": g.to_string(), "Ns": ns,
            "fraction": DENSITY_FRACTION, "decrease_slack": DECREASE_SLACK,
        }),
    );
    let f_norm = f.norm_sq(g)?.value_sq.sqrt();
    let rows: Vec<(f64, Option<f64>)> = ns
        .par_iter()
        .map(|&n| {
            let c = construct_poles(f, n)?;
            let gram = distance_sq(f, &c, g)?;
            let quad = if n <= CROSS_CHECK_MAX_N {
                Some(distance_sq_by_quadrature(f, &c, g)?)
            } else {
                None
            };
            Ok((gram, quad))
        })
        .collect::<Result<_>>()?;
    let d: Vec<f64> = rows.iter().map(|r| r.0.max(0.0).sqrt()).collect();
    report.reference("‖f‖", f_norm, "Taylor coefficients");
    report.series("‖f - h_N‖", ns_as_x(ns), d.clone());
    for (&n, r) in ns.iter().zip(&rows) {
        if let Some(q) = r.1 {
            report.at_most(
                format!("N={n}: pairwise vs quadrature ‖f - h_N‖²"),
                (r.0 - q).abs(),
                0.0,
                1e-6 * r.0.max(1e-300),
            );
        }
    }
    let mut worst_rise = 0.0f64;
    let mut running = f64::INFINITY;
    for &v in &d {
        if running.is_finite() {
            worst_rise = worst_rise.max(v / running - 1.0);
        }
        running = running.min(v);
    }
    report.at_most("largest rise over the running minimum", worst_rise, DECREASE_SLACK, 0.0);
    let last = *d.last().unwrap();
    if f.is_zero() {
        let psi: Vec<f64> = ns
            .iter()
            .map(|&n| psi_norm_sq(n, g).map(|r| r.value_sq.sqrt()))
            .collect::<Result<_>>()?;
        let worst = d.iter().zip(&psi).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
        report.series("‖Ψ_N‖", ns_as_x(ns), psi);
        report.at_most("relative gap to ‖Ψ_N‖", worst, 0.0, 1e-9);
    } else {
        report.at_most(
            format!("‖f - h_N‖ at N={} below {DENSITY_FRACTION}·‖f‖", ns.last().unwrap()),
            last,
            DENSITY_FRACTION * f_norm,
            0.0,
        );
        if d.len() >= 2 {
            // fit ‖f - h_N‖ ≈ A N^{-b} on the last two points
            let (n0, n1) = (ns[ns.len() - 2] as f64, *ns.last().unwrap() as f64);
            let b = (d[d.len() - 2] / last).ln() / (n1 / n0).ln();
            if b > 0.0 {
                let cross = n1 * (last / (DENSITY_FRACTION * f_norm)).powf(1.0 / b);
                report.note(format!(
                    "observed decay N^-{b:.3}; the target fraction is reached near N ≈ {cross:.0}"
                ));
            }
        }
    }
    Ok(report.finish())
}

/// Constructive and optimized distances from `f` to `SF_N` in `A²₁` against `π/√3`.
pub fn distance_limit_experiment(
    f: &BoundedAnalyticFunction,
    ns: &[usize],
    opts: &OptimizeOptions,
) -> Result<ExperimentReport> {
    check_ns(ns)?;
    if let Some(&n) = ns.iter().find(|&&n| n as f64 <= 2.0 * f.sup_bound_m) {
        return Err(Error::Monotonicity {
            n,
            two_m: 2.0 * f.sup_bound_m,
        });
    }
    let g = Weight::power(1.0)?;
    let mut report = ExperimentReport::new(
        "distance_limit",
        serde_json::json!({
            "f": f.taylor.iter().map(|a| [a.re, a.im]).collect::<Vec<_>>(),
            "weight": g.to_string(), "Ns": ns, "optimizer": options_json(opts), "slack": LIMIT_SLACK,
        }),
    );
    let mut upper = Vec::with_capacity(ns.len());
    let mut optimized = Vec::with_capacity(ns.len());
    for &n in ns {
        let c = construct_poles(f, n)?;
        upper.push(distance_sq(f, &c, &g)?.sqrt());
        optimized.push(distance_to_sfn(f, n, &g, opts)?.best_norm_sq.sqrt());
    }
    let limit = pi_over_sqrt3();
    report.reference("π/√3", limit, "closed form");
    report.series("constructive ‖f - h_N‖", ns_as_x(ns), upper.clone());
    report.series("optimized distance", ns_as_x(ns), optimized.clone());
    let (u, o) = (*upper.last().unwrap(), *optimized.last().unwrap());
    let n_max = *ns.last().unwrap();
    report.at_most(
        format!("constructive at N={n_max} < π/√3 + {LIMIT_SLACK}"),
        u,
        limit + LIMIT_SLACK,
        0.0,
    );
    report.at_least(
        format!("optimized at N={n_max} > π/√3 - {LIMIT_SLACK}"),
        o,
        limit - LIMIT_SLACK,
        0.0,
    );
    for (&n, (&u, &o)) in ns.iter().zip(upper.iter().zip(&optimized)) {
        report.at_most(format!("N={n}: optimized ≤ constructive"), o, u, 1e-9 * u);
    }
    if f.is_zero() {
        for (&n, &o) in ns.iter().zip(&optimized) {
            let psi = psi_norm_sq(n, &g)?.value_sq.sqrt();
            report.at_most(format!("N={n}: |distance - ‖Ψ_N‖|"), (o - psi).abs(), 0.0, 1e-9 * psi);
        }
    }
    report.note("optimized values are the best found, hence upper estimates of the distance");
    Ok(report.finish())
}
