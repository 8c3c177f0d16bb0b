//! Power sums of unimodular families and the Fejér-kernel lower bounds.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractions::PoleConfiguration;
use crate::norms::PointMasses;
use crate::quadrature::{gauss_kronrod, Tolerance};
use crate::report::ExperimentReport;

/// Relative agreement required between the two annulus computations.
pub const ANNULUS_AGREEMENT: f64 = 1e-6;

/// Slack for the floors, which are attained with equality in some cases.
const FLOOR_SLACK: f64 = 1e-12;

/// `b_k = e^{i angle_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnimodularFamily {
    pub angles: Vec<f64>,
}

impl UnimodularFamily {
    pub fn new(angles: Vec<f64>) -> Result<UnimodularFamily> {
        if angles.is_empty() {
            return Err(Error::Domain("a unimodular family needs N ≥ 1 members".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("angles must be finite".into()));
        }
        Ok(UnimodularFamily { angles })
    }

    pub fn roots_of_unity(n: usize) -> UnimodularFamily {
        UnimodularFamily {
            angles: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnimodularFamily {
        UnimodularFamily {
            angles: (0..n).map(|_| rng.gen_range(0.0..TAU)).collect(),
        }
    }

    /// Family number `trial` of the stream for `seed`.
    pub fn seeded(n: usize, seed: u64, trial: u64) -> UnimodularFamily {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        UnimodularFamily::random(n, &mut rng)
    }

    /// Clustered and near-duplicate families of size `n`.
    pub fn adversarial(n: usize) -> Vec<(&'static str, UnimodularFamily)> {
        let n_f = n as f64;
        vec![
            ("all equal", UnimodularFamily { angles: vec![0.0; n] }),
            (
                "cluster 1e-3",
                UnimodularFamily {
                    angles: (0..n).map(|k| 1e-3 * k as f64 / n_f).collect(),
                },
            ),
            (
                "near duplicates",
                UnimodularFamily {
                    angles: (0..n)
                        .map(|k| TAU * (k / 2) as f64 / n_f + 1e-9 * (k % 2) as f64)
                        .collect(),
                },
            ),
            (
                "two clusters",
                UnimodularFamily {
                    angles: (0..n)
                        .map(|k| if k % 2 == 0 { 0.0 } else { std::f64::consts::PI } + 1e-6 * k as f64)
                        .collect(),
                },
            ),
            ("roots of unity", UnimodularFamily::roots_of_unity(n)),
        ]
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

impl From<&PoleConfiguration> for UnimodularFamily {
    fn from(c: &PoleConfiguration) -> UnimodularFamily {
        UnimodularFamily {
            angles: c.angles().to_vec(),
        }
    }
}

/// `S_1, …, S_J` with `S_j = Σ_k b_k^j`, by iterated multiplication.
pub fn power_sums(b: &UnimodularFamily, j_max: usize) -> Vec<Complex64> {
    power_sums_from(b, 0, j_max)
}

/// `F_j(x) = (1/j)(sin(jx/2)/sin(x/2))²`, equal to `j` at `x ≡ 0`.
pub fn fejer_kernel(j: usize, x: f64) -> f64 {
    assert!(j >= 1);
    let x = crate::fractions::wrap_pi(x);
    let j_f = j as f64;
    if x == 0.0 {
        return j_f;
    }
    let q = (0.5 * j_f * x).sin() / (0.5 * x).sin();
    q * q / j_f
}

/// `Σ_{|m|<j} (1 - |m|/j) cos(mx)`, the cosine-sum form of [`fejer_kernel`].
pub fn fejer_kernel_cosine(j: usize, x: f64) -> f64 {
    assert!(j >= 1);
    let j_f = j as f64;
    1.0 + 2.0
        * (1..j)
            .map(|m| (1.0 - m as f64 / j_f) * (m as f64 * x).cos())
            .sum::<f64>()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FejerBound {
    pub weighted_sum: f64,
    pub floor: f64,
    /// `None` when `M < N`, where the floor is not claimed.
    pub holds: Option<bool>,
}

/// `Σ_{j≤M} (1 - j/(M+1))|S_j|²` against `N(M-N+1)/2`.
pub fn fejer_weighted_bound(b: &UnimodularFamily, m: usize) -> FejerBound {
    assert!(m >= 1);
    let n = b.len() as f64;
    let m1 = (m + 1) as f64;
    let weighted_sum = power_sums(b, m)
        .iter()
        .enumerate()
        .map(|(i, s)| (1.0 - (i + 1) as f64 / m1) * s.norm_sqr())
        .sum();
    let floor = 0.5 * n * (m as f64 - n + 1.0);
    let holds = (m >= b.len()).then_some(weighted_sum >= floor * (1.0 - FLOOR_SLACK));
    FejerBound {
        weighted_sum,
        floor,
        holds,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentBound {
    pub sum: f64,
    pub floor: f64,
    pub pass: bool,
}

/// `Σ_{j≤2N} |S_j|²` against `N²/2`.
pub fn moment_lower_bound_check(b: &UnimodularFamily) -> MomentBound {
    let n = b.len();
    let sum: f64 = power_sums(b, 2 * n).iter().map(|s| s.norm_sqr()).sum();
    let floor = 0.5 * (n * n) as f64;
    MomentBound {
        sum,
        floor,
        pass: sum >= floor * (1.0 - FLOOR_SLACK),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialSummary {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub fejer_failures: usize,
    pub moment_failures: usize,
    /// Smallest `Σ_{j≤2N}|S_j|² / N²` seen (an empirical δ).
    pub min_moment_ratio: f64,
    /// Smallest `weighted_sum / floor` with `M = 2N`.
    pub min_fejer_ratio: f64,
}

/// Random families plus the adversarial fixtures, with `M = 2N`.
pub fn moment_trials(n: usize, trials: usize, seed: u64) -> TrialSummary {
    let mut families: Vec<UnimodularFamily> = (0..trials as u64)
        .into_par_iter()
        .map(|t| UnimodularFamily::seeded(n, seed, t))
        .collect();
    families.extend(UnimodularFamily::adversarial(n).into_iter().map(|(_, f)| f));
    let results: Vec<(FejerBound, MomentBound)> = families
        .par_iter()
        .map(|b| (fejer_weighted_bound(b, 2 * n), moment_lower_bound_check(b)))
        .collect();
    let n2 = (n * n) as f64;
    TrialSummary {
        n,
        trials,
        seed,
        fejer_failures: results.iter().filter(|r| r.0.holds == Some(false)).count(),
        moment_failures: results.iter().filter(|r| !r.1.pass).count(),
        min_moment_ratio: results.iter().map(|r| r.1.sum / n2).fold(f64::INFINITY, f64::min),
        min_fejer_ratio: results
            .iter()
            .map(|r| r.0.weighted_sum / r.0.floor)
            .fold(f64::INFINITY, f64::min),
    }
}

pub fn moments_experiment(ns: &[usize], trials: usize, seed: u64) -> ExperimentReport {
    let mut report = ExperimentReport::new(
        "moments",
        serde_json::json!({ "Ns": ns, "trials": trials, "seed": seed, "M": "2N" }),
    );
    let summaries: Vec<TrialSummary> = ns.iter().map(|&n| moment_trials(n, trials, seed)).collect();
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    report.series(
        "min Σ|S_j|²/N²",
        x.clone(),
        summaries.iter().map(|s| s.min_moment_ratio).collect(),
    );
    report.series(
        "min Fejér sum / floor",
        x,
        summaries.iter().map(|s| s.min_fejer_ratio).collect(),
    );
    report.reference("moment floor ratio", 0.5, "closed form");
    for s in &summaries {
        report.at_least(
            format!("N={}: min Σ_(j≤2N)|S_j|²/N² ≥ 1/2", s.n),
            s.min_moment_ratio,
            0.5,
            0.5 * FLOOR_SLACK,
        );
        report.at_least(
            format!("N={}: min Fejér sum/floor ≥ 1", s.n),
            s.min_fejer_ratio,
            1.0,
            FLOOR_SLACK,
        );
    }
    report.note(format!(
        "{} random families per N plus {} adversarial fixtures",
        trials,
        UnimodularFamily::adversarial(1).len()
    ));
    report.finish()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnnulusEnergy {
    pub n: usize,
    /// `∫_{1/N < 1-|z|² < 2/N} |h|² dm₂` by quadrature of circle means.
    pub quadrature: f64,
    pub quadrature_error: f64,
    /// The same integral from the Taylor coefficients `-Σ_k ā_k^{s+1}`.
    pub taylor_proxy: f64,
    pub relative_difference: f64,
    /// `quadrature / N`.
    pub ratio: f64,
}

/// Energy of `h = Σ 1/(z - a_k)` on the band `1/N < 1 - |z|² < 2/N`.
pub fn annulus_energy(c: &PoleConfiguration) -> Result<AnnulusEnergy> {
    let n = c.len();
    if n < 2 {
        return Err(Error::Domain("the annulus energy needs N ≥ 2".into()));
    }
    let n_f = n as f64;
    let pm = PointMasses::from_configuration(c);
    // t = 1 - |z|², dm₂ = dA/π, so I = ∫ band of the circle mean dt
    let cell = std::cell::Cell::new(None);
    let q = gauss_kronrod(
        |t| match pm.circle_mean(t) {
            Ok(v) => v,
            Err(e) => {
                cell.set(Some(e.to_string()));
                f64::NAN
            }
        },
        1.0 / n_f,
        2.0 / n_f,
        Tolerance::new(0.0, 1e-10),
    )?;
    if let Some(msg) = cell.take() {
        return Err(Error::Domain(format!("circle mean failed: {msg}")));
    }
    let taylor_proxy = annulus_taylor_proxy(c);
    let relative_difference = (q.value - taylor_proxy).abs() / taylor_proxy;
    if relative_difference > ANNULUS_AGREEMENT {
        return Err(Error::Quadrature {
            achieved: relative_difference,
            requested: ANNULUS_AGREEMENT,
        });
    }
    Ok(AnnulusEnergy {
        n,
        quadrature: q.value,
        quadrature_error: q.error,
        taylor_proxy,
        relative_difference,
        ratio: q.value / n_f,
    })
}

/// `Σ_s (∫_{1-2/N}^{1-1/N} v^s dv) |Σ_k ā_k^{s+1}|²`, summed until the tail is negligible.
pub fn annulus_taylor_proxy(c: &PoleConfiguration) -> f64 {
    let n = c.len();
    let n_f = n as f64;
    let (hi, lo) = (1.0 - 1.0 / n_f, 1.0 - 2.0 / n_f);
    let b = UnimodularFamily::from(c);
    let (mut hi_pow, mut lo_pow) = (hi, lo);
    let mut sum = 0.0;
    let mut chunk = 0;
    loop {
        let sums = power_sums_from(&b, chunk, 1024);
        for (i, s) in sums.iter().enumerate() {
            let k = (chunk + i + 1) as f64;
            sum += (hi_pow - lo_pow) / k * s.norm_sqr();
            hi_pow *= hi;
            lo_pow *= lo;
        }
        chunk += sums.len();
        // |S|² ≤ N², Σ_{k>K} hi^k/k ≤ N hi^K / K
        if n_f * n_f * n_f * hi_pow / chunk as f64 <= 1e-17 * sum {
            return sum;
        }
    }
}

/// `S_{start+1}, …, S_{start+len}`; powers are renormalized every 64 steps.
fn power_sums_from(b: &UnimodularFamily, start: usize, len: usize) -> Vec<Complex64> {
    let base: Vec<Complex64> = b.angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect();
    let mut pow: Vec<Complex64> = b
        .angles
        .iter()
        .map(|&a| Complex64::from_polar(1.0, a * (start + 1) as f64))
        .collect();
    let mut out = Vec::with_capacity(len);
    for j in 1..=len {
        out.push(pow.iter().sum());
        if j % 64 == 0 {
            for p in &mut pow {
                *p /= p.norm();
            }
        }
        for (p, q) in pow.iter_mut().zip(&base) {
            *p *= q;
        }
    }
    out
}

/// Smallest `I/N` over `configs` random configurations (an empirical constant).
pub fn annulus_sweep(n: usize, configs: usize, seed: u64) -> Result<f64> {
    let ratios: Vec<f64> = (0..configs as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            annulus_energy(&PoleConfiguration::random(n, &mut rng)).map(|a| a.ratio)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn power_sums_of_simple_families() {
        for s in power_sums(&UnimodularFamily::roots_of_unity(7), 20).iter().enumerate() {
            let j = s.0 + 1;
            let expect = if j % 7 == 0 { 7.0 } else { 0.0 };
            assert!((s.1 - Complex64::new(expect, 0.0)).norm() < 1e-12, "j={j}");
        }
        let ones = UnimodularFamily::new(vec![0.0; 5]).unwrap();
        assert!(power_sums(&ones, 9)
            .iter()
            .all(|s| (s.re - 5.0).abs() < 1e-15 && s.im == 0.0));
        let pm = UnimodularFamily::new(vec![0.0, PI]).unwrap();
        for (i, s) in power_sums(&pm, 10).iter().enumerate() {
            let expect = if (i + 1) % 2 == 0 { 2.0 } else { 0.0 };
            assert!((s.re - expect).abs() < 1e-14 && s.im.abs() < 1e-14);
        }
    }

    #[test]
    fn power_sums_stay_bounded_over_long_runs() {
        let b = UnimodularFamily::seeded(5, 3, 0);
        let s = power_sums(&b, 5000);
        assert!(s.iter().all(|s| s.norm() <= 5.0 + 1e-9));
        let direct: Complex64 = b.angles.iter().map(|a| Complex64::from_polar(1.0, 5000.0 * a)).sum();
        assert!((s[4999] - direct).norm() < 1e-9);
        let tail = power_sums_from(&b, 3000, 2000);
        assert!((tail[1999] - direct).norm() < 1e-9);
    }

    #[test]
    fn fejer_kernel_values() {
        assert_eq!(fejer_kernel(2, 0.0), 2.0);
        assert!((fejer_kernel(2, 1e-9) - 2.0).abs() < 1e-12);
        assert!(fejer_kernel(2, PI).abs() < 1e-30);
        assert_eq!(fejer_kernel(5, TAU), 5.0);
        for j in [1, 2, 5, 17] {
            for i in 0..200 {
                let x = -7.0 + 0.07 * i as f64;
                assert!((fejer_kernel(j, x) - fejer_kernel_cosine(j, x)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weighted_bound_examples() {
        let one = UnimodularFamily::new(vec![0.0]).unwrap();
        let r = fejer_weighted_bound(&one, 2);
        assert!((r.weighted_sum - 1.0).abs() < 1e-15 && r.floor == 1.0);
        assert_eq!(r.holds, Some(true));
        let pm = UnimodularFamily::new(vec![0.0, PI]).unwrap();
        let r = fejer_weighted_bound(&pm, 4);
        assert!((r.weighted_sum - 3.2).abs() < 1e-12 && r.floor == 3.0);
        assert_eq!(
            fejer_weighted_bound(&UnimodularFamily::roots_of_unity(8), 3).holds,
            None
        );
    }

    #[test]
    fn moment_bound_examples() {
        let one = UnimodularFamily::new(vec![0.0]).unwrap();
        let r = moment_lower_bound_check(&one);
        assert!(r.pass && (r.sum - 2.0).abs() < 1e-15 && r.floor == 0.5);
        let r = moment_lower_bound_check(&UnimodularFamily::roots_of_unity(9));
        assert!((r.sum - 2.0 * 81.0).abs() < 1e-9);
    }

    #[test]
    fn trials_pass() {
        let s = moment_trials(8, 200, 1);
        assert_eq!((s.fejer_failures, s.moment_failures), (0, 0));
        assert!(s.min_moment_ratio >= 0.5 && s.min_fejer_ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn annulus_two_routes_agree() {
        let a = annulus_energy(&PoleConfiguration::equispaced(8)).unwrap();
        assert!(a.relative_difference < 1e-6 && a.ratio > 0.0);
        let a = annulus_energy(&PoleConfiguration::new(vec![0.0, PI]).unwrap()).unwrap();
        assert!(a.quadrature.is_finite() && a.quadrature > 0.0);
        assert!(annulus_energy(&PoleConfiguration::equispaced(1)).is_err());
    }

    #[test]
    fn annulus_equispaced_closed_form() {
        // Ψ_N has Taylor coefficients -N at z^{kN-1}, zero elsewhere
        for n in [2usize, 4, 8] {
            let n_f = n as f64;
            let (hi, lo) = (1.0 - 1.0 / n_f, 1.0 - 2.0 / n_f);
            let exact: f64 = (1..20000)
                .map(|k| {
                    let e = (k * n) as f64;
                    n_f * n_f * (hi.powf(e) - lo.powf(e)) / e
                })
                .sum();
            let a = annulus_taylor_proxy(&PoleConfiguration::equispaced(n));
            assert!((a - exact).abs() < 1e-12 * exact);
        }
    }
}
