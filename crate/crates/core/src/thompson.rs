//! Pole placement `x_{N,k} = W_N^{-1}(k)` with
//! `W_N(t) = Nt - 2∫₀ᵗ Re(e^{2πiu} f(e^{2πiu})) du`, and the growth checks
//! for the resulting simplest fractions.

use std::f64::consts::{E, PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractions::{PoleConfiguration, SimplestFraction};
use crate::norms::{norm_sq_taylor, NormResult};
use crate::weights::Weight;

/// Boundary samples used to certify `sup_bound_m`.
pub const SUP_SAMPLES: usize = 4096;
/// Multiplicative safety margin on the sampled sup.
pub const SUP_SAFETY: f64 = 1e-3;

/// `C₀` from [`calibrate_c0`] on the built-in corpus, `N ∈ {64, …, 1024}`,
/// `10⁴` samples with seed 1 (measured 1.0989), rounded up.
pub const CALIBRATED_C0: f64 = 1.1;

/// A polynomial `Σ a_d z^d` with a sampled bound on `sup_{|z|=1} |f|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundedAnalyticFunction {
    pub taylor: Vec<Complex64>,
    pub sup_bound_m: f64,
}

#[derive(Deserialize)]
#[serde(transparent)]
struct CoefficientPairs(Vec<[f64; 2]>);

impl BoundedAnalyticFunction {
    pub fn new(taylor: Vec<Complex64>) -> Result<BoundedAnalyticFunction> {
        if taylor.is_empty() {
            return Err(Error::Domain("f needs at least one Taylor coefficient".into()));
        }
        if taylor.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Domain("non-finite Taylor coefficient".into()));
        }
        let samples = SUP_SAMPLES.max(16 * taylor.len());
        let sup = (0..samples)
            .map(|j| horner(&taylor, Complex64::from_polar(1.0, TAU * j as f64 / samples as f64)).norm())
            .fold(0.0, f64::max);
        Ok(BoundedAnalyticFunction {
            taylor,
            sup_bound_m: sup * (1.0 + SUP_SAFETY),
        })
    }

    pub fn zero() -> BoundedAnalyticFunction {
        BoundedAnalyticFunction {
            taylor: vec![Complex64::new(0.0, 0.0)],
            sup_bound_m: 0.0,
        }
    }

    pub fn constant(c: Complex64) -> BoundedAnalyticFunction {
        BoundedAnalyticFunction::new(vec![c]).expect("finite constant")
    }

    /// JSON array of `[re, im]` pairs, lowest degree first.
    pub fn from_json_str(s: &str) -> Result<BoundedAnalyticFunction> {
        let pairs: CoefficientPairs = serde_json::from_str(s)?;
        BoundedAnalyticFunction::new(pairs.0.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<BoundedAnalyticFunction> {
        BoundedAnalyticFunction::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// `zero`, `const:<re>[,<im>]` or `taylor:<file.json>`.
    pub fn parse(spec: &str) -> Result<BoundedAnalyticFunction> {
        let spec = spec.trim();
        if spec == "zero" || spec == "0" {
            return Ok(BoundedAnalyticFunction::zero());
        }
        if let Some(rest) = spec.strip_prefix("const:") {
            let parts: Vec<&str> = rest.split(',').collect();
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad constant in `{spec}`")))
            };
            let c = match parts.as_slice() {
                [re] => Complex64::new(num(re)?, 0.0),
                [re, im] => Complex64::new(num(re)?, num(im)?),
                _ => return Err(Error::Parse(format!("bad constant `{spec}`"))),
            };
            return BoundedAnalyticFunction::new(vec![c]);
        }
        if let Some(path) = spec.strip_prefix("taylor:") {
            return BoundedAnalyticFunction::from_json_file(path);
        }
        Err(Error::Parse(format!(
            "unknown function spec `{spec}` (expected zero, const:<x> or taylor:<file>)"
        )))
    }

    pub fn degree(&self) -> usize {
        self.taylor.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.taylor.iter().all(|a| *a == Complex64::new(0.0, 0.0))
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        horner(&self.taylor, z)
    }

    /// `z ↦ f((1-δ)z)`.
    pub fn dilate(&self, delta: f64) -> Result<BoundedAnalyticFunction> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::Domain(format!("dilation δ = {delta} must lie in [0, 1)")));
        }
        let r = 1.0 - delta;
        let mut scale = 1.0;
        let taylor = self
            .taylor
            .iter()
            .map(|a| {
                let v = a * scale;
                scale *= r;
                v
            })
            .collect();
        BoundedAnalyticFunction::new(taylor)
    }

    /// `‖f‖²_(g)`, exact for the polynomial.
    pub fn norm_sq(&self, g: &Weight) -> Result<NormResult> {
        norm_sq_taylor(&self.taylor, g, 0.0)
    }
}

fn horner(a: &[Complex64], z: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// The fixed test functions `0, ½, z/2, (z+1)/3, 0.4z²`.
pub fn corpus() -> Vec<(&'static str, BoundedAnalyticFunction)> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let f = |t: Vec<Complex64>| BoundedAnalyticFunction::new(t).expect("finite");
    vec![
        ("0", BoundedAnalyticFunction::zero()),
        ("1/2", f(vec![c(0.5)])),
        ("z/2", f(vec![c(0.0), c(0.5)])),
        ("(z+1)/3", f(vec![c(1.0 / 3.0), c(1.0 / 3.0)])),
        ("0.4z^2", f(vec![c(0.0), c(0.0), c(0.4)])),
    ]
}

fn check_monotone(f: &BoundedAnalyticFunction, n: usize) -> Result<()> {
    let two_m = 2.0 * f.sup_bound_m;
    if (n as f64) <= two_m {
        return Err(Error::Monotonicity { n, two_m });
    }
    Ok(())
}

fn w_unchecked(f: &BoundedAnalyticFunction, n: usize, t: f64) -> f64 {
    // ∫₀ᵗ 2Re(a_d e^{2πi(d+1)u}) du = Re(a_d (e^{2πi(d+1)t} - 1)/(πi(d+1)))
    let mut s = 0.0;
    for (d, a) in f.taylor.iter().enumerate() {
        if *a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let m = (d + 1) as f64;
        let phase = (m * t).rem_euclid(1.0);
        let e = Complex64::from_polar(1.0, TAU * phase) - 1.0;
        s += (a * e / Complex64::new(0.0, PI * m)).re;
    }
    n as f64 * t - s
}

fn w_prime_unchecked(f: &BoundedAnalyticFunction, n: usize, t: f64) -> f64 {
    let z = Complex64::from_polar(1.0, TAU * t);
    n as f64 - 2.0 * (z * f.evaluate(z)).re
}

/// `W_N(t)`, exact from the Taylor polynomial; needs `N > 2M`.
pub fn weight_function_w(f: &BoundedAnalyticFunction, n: usize, t: f64) -> Result<f64> {
    check_monotone(f, n)?;
    if t == 1.0 {
        return Ok(n as f64);
    }
    Ok(w_unchecked(f, n, t))
}

/// `W_N'(t) = N - 2 Re(e^{2πit} f(e^{2πit}))`.
pub fn weight_function_w_prime(f: &BoundedAnalyticFunction, n: usize, t: f64) -> Result<f64> {
    check_monotone(f, n)?;
    Ok(w_prime_unchecked(f, n, t))
}

/// Residual accepted by [`construct_poles`] at level `N`.
pub fn root_tolerance(n: usize) -> f64 {
    1e-12_f64.max(8.0 * f64::EPSILON * n as f64)
}

/// Angles `2π x_{N,k}`, `W_N(x_{N,k}) = k`, `k = 0..N-1`.
pub fn construct_poles(f: &BoundedAnalyticFunction, n: usize) -> Result<PoleConfiguration> {
    check_monotone(f, n)?;
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let nf = n as f64;
    // |W_N(t) - Nt| ≤ Σ 2|a_d|/(π(d+1))
    let spread: f64 = f
        .taylor
        .iter()
        .enumerate()
        .map(|(d, a)| 2.0 * a.norm() / (PI * (d + 1) as f64))
        .sum();
    let tol = root_tolerance(n);
    let xs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return Ok(0.0);
            }
            let target = k as f64;
            let h = |x: f64| w_unchecked(f, n, x) - target;
            let mut lo = ((target - spread) / nf).max(0.0);
            let mut hi = ((target + spread) / nf).min(1.0);
            // widen in case rounding put the root just outside
            let pad = 4.0 * f64::EPSILON;
            lo = (lo - pad).max(0.0);
            hi = (hi + pad).min(1.0);
            if h(lo) > 0.0 || h(hi) < 0.0 {
                return Err(Error::RootFinding(format!("W_N(x) = {k} is not bracketed")));
            }
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if h(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut x = 0.5 * (lo + hi);
            for _ in 0..5 {
                let r = h(x);
                if r.abs() < 0.25 * tol {
                    break;
                }
                let step = r / w_prime_unchecked(f, n, x);
                let next = x - step;
                if !(lo - 1e-10..=hi + 1e-10).contains(&next) {
                    break;
                }
                x = next;
            }
            let r = h(x).abs();
            if r >= tol {
                return Err(Error::RootFinding(format!("|W_N(x) - {k}| = {r:e} after polishing")));
            }
            Ok(x)
        })
        .collect::<Result<_>>()?;
    PoleConfiguration::new(xs.into_iter().map(|x| TAU * x).collect())
}

/// `h_N ∈ SF_N` with poles `e^{2πi x_{N,k}}`.
pub fn thompson_approximant(f: &BoundedAnalyticFunction, n: usize) -> Result<SimplestFraction> {
    Ok(SimplestFraction::new(construct_poles(f, n)?))
}

/// `max |f - h|` on the 64×64 polar grid of `{|z| ≤ radius}` (rim included).
pub fn sup_error(f: &BoundedAnalyticFunction, h: &SimplestFraction, radius: f64) -> Result<f64> {
    const GRID: usize = 64;
    let rows: Vec<f64> = (1..=GRID)
        .into_par_iter()
        .map(|i| {
            let r = radius * i as f64 / GRID as f64;
            let mut worst = 0.0f64;
            for j in 0..GRID {
                let z = Complex64::from_polar(r, TAU * j as f64 / GRID as f64);
                worst = worst.max((f.evaluate(z) - h.evaluate(z)?).norm());
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let centre = (f.evaluate(Complex64::new(0.0, 0.0)) - h.evaluate(Complex64::new(0.0, 0.0))?).norm();
    Ok(rows.into_iter().fold(centre, f64::max))
}

/// Rounding level of `Σ_k 1/(z - a_k)` on `{|z| ≤ radius}`: `16 N ε/(1 - radius)`.
///
/// For polynomial targets the approximation error falls below this within
/// moderate `N`, so sup-error sequences are compared above this floor.
pub fn evaluation_noise(n: usize, radius: f64) -> f64 {
    16.0 * f64::EPSILON * n as f64 / (1.0 - radius)
}

/// Outcome of a bound check; `margin = rhs - lhs`, so a pass has every margin ≥ 0.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheckReport {
    pub c0: f64,
    pub samples: usize,
    pub worst_margin: f64,
    pub worst_point: Option<[f64; 2]>,
    pub passed: bool,
    pub entries: Vec<BoundEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundEntry {
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// `I_r / (N (1-r)^{1-p})`, reported for `r ≥ 1 - 1/N`.
    pub remark_ratio: Option<f64>,
}

/// Random points `r e^{iθ}` with `r = 1 - 10^{-U(0,3)}` and uniform `θ`.
pub fn disk_samples(count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = 1.0 - 10f64.powf(-rng.gen_range(0.0..3.0));
            Complex64::from_polar(r, rng.gen_range(0.0..TAU))
        })
        .collect()
}

/// Right side `1/(1-|z|) + C₀ M log(e/(1-|z|))`.
pub fn pointwise_bound(z: Complex64, m: f64, c0: f64) -> f64 {
    let d = 1.0 - z.norm();
    1.0 / d + c0 * m * (E / d).ln()
}

/// Compares `|h(z)|` with [`pointwise_bound`] on the given samples.
///
/// A relative slack of `1e-12` absorbs rounding in `|Ψ_N(z)| ≤ 1/(1-|z|)`.
pub fn check_pointwise_bound(h: &SimplestFraction, m: f64, c0: f64, samples: &[Complex64]) -> Result<BoundCheckReport> {
    let margins: Vec<(f64, Complex64)> = samples
        .par_iter()
        .map(|&z| {
            let lhs = h.evaluate(z)?.norm();
            let rhs = pointwise_bound(z, m, c0);
            Ok((rhs * (1.0 + 1e-12) - lhs, z))
        })
        .collect::<Result<_>>()?;
    let (worst_margin, worst) =
        margins.iter().copied().fold(
            (f64::INFINITY, Complex64::new(0.0, 0.0)),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    Ok(BoundCheckReport {
        c0,
        samples: samples.len(),
        worst_margin,
        worst_point: (!samples.is_empty()).then_some([worst.re, worst.im]),
        passed: worst_margin >= 0.0,
        entries: Vec::new(),
    })
}

/// `max (|h(z)| - 1/(1-|z|))₊ / (M log(e/(1-|z|)))` over the samples.
pub fn pointwise_ratio(h: &SimplestFraction, m: f64, samples: &[Complex64]) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    let ratios: Vec<f64> = samples
        .par_iter()
        .map(|&z| {
            let d = 1.0 - z.norm();
            let excess = (h.evaluate(z)?.norm() - 1.0 / d).max(0.0);
            Ok(excess / (m * (E / d).ln()))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `max |h(z) - e^{-iϑ_m} Ψ_N(z e^{-iϑ_m})| / (M log(e/(1-|z|)))` over the samples,
/// with `e^{iϑ_m}` the pole of `h` nearest to `z`.
pub fn deviation_ratio(h: &SimplestFraction, m: f64, samples: &[Complex64]) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    let n = h.n();
    let mut sorted = h.poles.angles().to_vec();
    sorted.sort_by(f64::total_cmp);
    let nearest = |arg: f64| {
        let i = sorted.partition_point(|&a| a < arg);
        let cands = [sorted[(i + n - 1) % n], sorted[i % n]];
        let d = |a: f64| crate::fractions::wrap_pi(arg - a).abs();
        if d(cands[0]) <= d(cands[1]) {
            cands[0]
        } else {
            cands[1]
        }
    };
    let ratios: Vec<f64> = samples
        .par_iter()
        .map(|&z| {
            let arg = z.arg().rem_euclid(TAU);
            let rot = Complex64::from_polar(1.0, -nearest(arg));
            let model = rot * crate::fractions::psi(n, z * rot)?;
            let d = 1.0 - z.norm();
            Ok((h.evaluate(z)? - model).norm() / (m * (E / d).ln()))
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// `C₀ = 1.1 · max` of [`pointwise_ratio`] and [`deviation_ratio`] over the
/// functions and levels given.
///
/// The first ratio alone is zero on typical samples, since `|h|` rarely
/// exceeds `1/(1-|z|)`; the second is the quantity the constant controls in
/// the construction, and it also governs the circle-mean bound.
pub fn calibrate_c0(functions: &[BoundedAnalyticFunction], ns: &[usize], samples: usize, seed: u64) -> Result<f64> {
    let points = disk_samples(samples, seed);
    let mut worst = 0.0f64;
    for f in functions {
        for &n in ns {
            let h = thompson_approximant(f, n)?;
            worst = worst.max(pointwise_ratio(&h, f.sup_bound_m, &points)?);
            worst = worst.max(deviation_ratio(&h, f.sup_bound_m, &points)?);
        }
    }
    Ok(1.1 * worst)
}

/// `ρ(β) = (1+β)/((1+β)^{1/(p-1)} - 1)^{p-1}`, and `1` for `p = 1`.
pub fn rho(beta: f64, p: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β = {beta} must be positive")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p = {p} must be finite and ≥ 1")));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let q = p - 1.0;
    let base = ((1.0 + beta).ln() / q).exp_m1();
    Ok((1.0 + beta) / base.powf(q))
}

/// Largest relative violation of `(x+y)^p ≤ (1+β)x^p + ρ(β)y^p` over random pairs in `[0, 10)²`.
pub fn rho_inequality_violation(beta: f64, p: f64, pairs: usize, seed: u64) -> Result<f64> {
    let r = rho(beta, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..pairs {
        let x: f64 = rng.gen_range(0.0..10.0);
        let y: f64 = rng.gen_range(0.0..10.0);
        let lhs = (x + y).powf(p);
        let rhs = (1.0 + beta) * x.powf(p) + r * y.powf(p);
        worst = worst.max((lhs - rhs) / rhs.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// A circle mean with its node-doubling error estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CircleMean {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes: usize,
}

const MAX_CIRCLE_NODES: usize = 1 << 24;

/// `∫₀¹ |h(r e^{2πis})|^p ds` by the trapezoid rule, doubling from `nodes`
/// until successive values agree to `1e-11` relative or `abs_tol` absolute.
///
/// `abs_tol` should cover the rounding noise of evaluating `h`.
pub fn circle_mean_p<H>(h: H, r: f64, p: f64, nodes: usize, abs_tol: f64) -> Result<CircleMean>
where
    H: Fn(Complex64) -> Result<Complex64> + Sync,
{
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} must lie in [0, 1)")));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p = {p} must be ≥ 1")));
    }
    let sample = |n: usize, offset: usize, stride: usize| -> Result<f64> {
        let parts: Vec<f64> = (0..n / stride)
            .into_par_iter()
            .map(|j| {
                let s = (j * stride + offset) as f64 / n as f64;
                Ok(h(Complex64::from_polar(r, TAU * s))?.norm().powf(p))
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum())
    };
    let mut n = nodes.max(16);
    let mut sum = sample(n, 0, 1)?;
    let mut value = sum / n as f64;
    let mut err = f64::INFINITY;
    loop {
        if 2 * n > MAX_CIRCLE_NODES {
            return Err(Error::Quadrature {
                achieved: err,
                requested: abs_tol.max(1e-11 * value.abs()),
            });
        }
        // reuse the old nodes; evaluate only the new midpoints
        sum += sample(2 * n, 1, 2)?;
        n *= 2;
        let next = sum / n as f64;
        err = (next - value).abs();
        value = next;
        if err <= 1e-11 * value.abs() || err <= abs_tol {
            return Ok(CircleMean {
                value,
                error_estimate: err,
                nodes: n,
            });
        }
    }
}

/// Circle means of `h_N` at each radius against
/// `(1+β) ∫|Ψ_N(r·)|^p + ρ(β) C₀^p M^p log^p(e/(1-r))`.
pub fn check_integral_bound(
    f: &BoundedAnalyticFunction,
    n: usize,
    p: f64,
    beta: f64,
    c0: f64,
    radii: &[f64],
) -> Result<BoundCheckReport> {
    let h = thompson_approximant(f, n)?;
    let rho_b = rho(beta, p)?;
    let m = f.sup_bound_m;
    let nodes = 512.max(16 * n);
    let mut entries = Vec::with_capacity(radii.len());
    for &r in radii {
        // summing N terms of size ≤ 1/(1-r) loses about Nε/(1-r)
        let noise = (16.0 * f64::EPSILON * n as f64 / (1.0 - r)).powf(p);
        let lhs = circle_mean_p(|z| h.evaluate(z), r, p, nodes, noise)?;
        let base = circle_mean_p(|z| crate::fractions::psi(n, z), r, p, nodes, 0.0)?;
        let log_term = (E / (1.0 - r)).ln();
        let rhs = (1.0 + beta) * base.value + rho_b * (c0 * m * log_term).powf(p);
        // quadrature and rounding uncertainty, credited to the left side
        let slack = lhs.error_estimate + noise + (1.0 + beta) * base.error_estimate;
        let margin = rhs - lhs.value + slack;
        let remark_ratio = (r >= 1.0 - 1.0 / n as f64).then(|| lhs.value / (n as f64 * (1.0 - r).powf(1.0 - p)));
        entries.push(BoundEntry {
            radius: r,
            lhs: lhs.value,
            rhs,
            margin,
            remark_ratio,
        });
    }
    let (worst_margin, worst_r) = entries
        .iter()
        .map(|e| (e.margin, e.radius))
        .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a });
    Ok(BoundCheckReport {
        c0,
        samples: radii.len(),
        worst_margin,
        worst_point: (!entries.is_empty()).then_some([worst_r, 0.0]),
        passed: worst_margin >= 0.0,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn sup_bound_covers_samples() {
        let f = BoundedAnalyticFunction::new(vec![c(0.3), Complex64::new(0.1, 0.2), c(-0.4)]).unwrap();
        for j in 0..10_000 {
            let z = Complex64::from_polar(1.0, TAU * (j as f64 + 0.37) / 10_000.0);
            assert!(f.evaluate(z).norm() <= f.sup_bound_m);
        }
        assert_eq!(BoundedAnalyticFunction::zero().sup_bound_m, 0.0);
        assert!((BoundedAnalyticFunction::constant(c(0.5)).sup_bound_m - 0.5005).abs() < 1e-15);
    }

    #[test]
    fn parses_specs() {
        assert!(BoundedAnalyticFunction::parse("zero").unwrap().is_zero());
        let f = BoundedAnalyticFunction::parse("const:0.5,-0.25").unwrap();
        assert_eq!(f.taylor, vec![Complex64::new(0.5, -0.25)]);
        let g = BoundedAnalyticFunction::from_json_str("[[0,0],[0.5,0]]").unwrap();
        assert_eq!(g.degree(), 1);
        assert!(BoundedAnalyticFunction::parse("sin:1").is_err());
    }

    #[test]
    fn dilation_scales_coefficients() {
        let f = BoundedAnalyticFunction::new(vec![c(1.0), c(1.0), c(1.0)]).unwrap();
        let g = f.dilate(0.5).unwrap();
        assert_eq!(g.taylor, vec![c(1.0), c(0.5), c(0.25)]);
        assert!(f.dilate(1.0).is_err());
    }

    #[test]
    fn w_for_zero_and_constants() {
        let zero = BoundedAnalyticFunction::zero();
        for t in [0.0, 0.1, 0.5, 0.9] {
            assert_eq!(weight_function_w(&zero, 7, t).unwrap(), 7.0 * t);
        }
        let half = BoundedAnalyticFunction::constant(c(0.5));
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let expect = 16.0 * t - 0.5 / PI * (TAU * t).sin();
            assert!((weight_function_w(&half, 16, t).unwrap() - expect).abs() < 1e-13);
        }
        let f = &corpus()[4].1;
        assert_eq!(weight_function_w(f, 5, 1.0).unwrap(), 5.0);
        assert_eq!(weight_function_w(f, 5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn w_prime_matches_difference_quotient() {
        let f = BoundedAnalyticFunction::new(vec![c(0.2), Complex64::new(0.1, 0.3), c(0.25)]).unwrap();
        for i in 1..50 {
            let t = i as f64 / 50.0;
            let h = 1e-6;
            let fd = (weight_function_w(&f, 9, t + h).unwrap() - weight_function_w(&f, 9, t - h).unwrap()) / (2.0 * h);
            let exact = weight_function_w_prime(&f, 9, t).unwrap();
            assert!((fd - exact).abs() < 1e-7, "t = {t}");
            assert!((exact - 9.0).abs() <= 2.0 * f.sup_bound_m);
        }
    }

    #[test]
    fn monotonicity_precondition() {
        let f = BoundedAnalyticFunction::constant(c(2.0));
        assert!(matches!(construct_poles(&f, 4), Err(Error::Monotonicity { .. })));
        assert!(construct_poles(&f, 5).is_ok());
    }

    #[test]
    fn zero_gives_roots_of_unity() {
        let cfg = construct_poles(&BoundedAnalyticFunction::zero(), 8).unwrap();
        for (k, a) in cfg.angles().iter().enumerate() {
            assert!((a - TAU * k as f64 / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_half_spacings() {
        let f = BoundedAnalyticFunction::constant(c(0.5));
        let n = 64;
        let cfg = construct_poles(&f, n).unwrap();
        let xs: Vec<f64> = cfg.angles().iter().map(|a| a / TAU).collect();
        for k in 0..n {
            let w = weight_function_w(&f, n, xs[k]).unwrap();
            assert!((w - k as f64).abs() < root_tolerance(n));
            let next = if k + 1 < n { xs[k + 1] } else { 1.0 };
            let gap = next - xs[k];
            assert!((gap - 1.0 / n as f64).abs() <= 8.0 * 0.5 / (n * n) as f64);
        }
    }

    #[test]
    fn linear_target_roots_in_unit_interval() {
        let f = &corpus()[2].1;
        let cfg = construct_poles(f, 128).unwrap();
        assert_eq!(cfg.len(), 128);
        assert!(cfg.min_separation() > 0.0);
        for a in cfg.angles() {
            assert!((0.0..TAU).contains(a));
        }
    }

    #[test]
    fn zero_target_sup_error_is_psi() {
        let f = BoundedAnalyticFunction::zero();
        for n in [4usize, 8, 16] {
            let h = thompson_approximant(&f, n).unwrap();
            let err = sup_error(&f, &h, 0.5).unwrap();
            let r: f64 = 0.5;
            let bound = n as f64 * r.powi(n as i32 - 1) / (1.0 - r.powi(n as i32));
            assert!(err <= bound * (1.0 + 1e-10), "N = {n}: {err} vs {bound}");
            assert!(err >= bound * 0.99);
        }
    }

    #[test]
    fn psi_meets_pointwise_bound() {
        let points = disk_samples(2000, 3);
        for n in [1usize, 7, 64] {
            let report = check_pointwise_bound(&SimplestFraction::psi(n), 0.0, 0.0, &points).unwrap();
            assert!(report.passed, "N = {n}: {report:?}");
        }
        let z = Complex64::from_polar(0.999, 0.0);
        assert!(pointwise_bound(z, 0.0, 0.0) >= 999.0);
    }

    #[test]
    fn rho_values() {
        for beta in [0.1, 1.0, 10.0] {
            assert!((rho(beta, 2.0).unwrap() - (1.0 + beta) / beta).abs() < 1e-12 * (1.0 + beta) / beta);
            assert_eq!(rho(beta, 1.0).unwrap(), 1.0);
        }
        let expect = 2.0 / (2f64.sqrt() - 1.0).powi(2);
        assert!((rho(1.0, 3.0).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 11.656_854_249_492_38).abs() < 1e-10);
        assert!(rho(1.0, 0.5).is_err());
        assert!(rho(0.0, 2.0).is_err());
    }

    #[test]
    fn rho_inequality_on_random_pairs() {
        for p in [1.0, 1.5, 2.0, 3.0] {
            for beta in [0.1, 1.0, 10.0] {
                assert!(rho_inequality_violation(beta, p, 20_000, 11).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn circle_means_closed_forms() {
        let r = 0.7;
        let one = SimplestFraction::psi(1);
        let m = circle_mean_p(|z| one.evaluate(z), r, 2.0, 512, 0.0).unwrap();
        assert!((m.value - 1.0 / (1.0 - r * r)).abs() < 1e-12);
        for n in [3usize, 16] {
            let psi = SimplestFraction::psi(n);
            let got = circle_mean_p(|z| psi.evaluate(z), r, 2.0, 512, 0.0).unwrap().value;
            let r2n = r.powi(2 * n as i32);
            let expect = (n * n) as f64 * r.powi(2 * n as i32 - 2) / (1.0 - r2n);
            assert!((got - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn circle_mean_parseval() {
        let f = BoundedAnalyticFunction::new(vec![c(0.3), Complex64::new(-0.2, 0.5), c(0.0), c(0.7)]).unwrap();
        let r: f64 = 0.9;
        let got = circle_mean_p(|z| Ok(f.evaluate(z)), r, 2.0, 512, 0.0).unwrap().value;
        let expect: f64 = f
            .taylor
            .iter()
            .enumerate()
            .map(|(s, a)| a.norm_sqr() * r.powi(2 * s as i32))
            .sum();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn integral_bound_trivial_for_zero() {
        let report = check_integral_bound(
            &BoundedAnalyticFunction::zero(),
            16,
            2.0,
            1e-9,
            1.0,
            &[0.5, 0.9, 1.0 - 1.0 / 16.0],
        )
        .unwrap();
        assert!(report.passed);
        let e = report.entries.last().unwrap();
        assert!(e.remark_ratio.unwrap() > 0.0);
    }
}
