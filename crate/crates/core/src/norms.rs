//! Squared norms `‖h‖²_(g) = κ_g ∫_D |h|² g(1 - |z|²) dm₂` by four routes:
//!
//! - Gram: `κ Σ_{j,k} φ_g(ϑ_j - ϑ_k)`,
//! - Taylor: `κ Σ_s |a_s|² c_s`,
//! - 2-D quadrature of the defining integral,
//! - the 1-D radial integral for `Ψ_N`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fractions::{taylor_coefficients_of, PoleConfiguration};
use crate::quadrature::{gauss_kronrod_segments, kronrod_nodes, Ladder, Tolerance};
use crate::weights::{MomentCoefficients, Weight};

/// Largest `N` accepted by [`psi_norm_sq`].
pub const PSI_N_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormMethod {
    GramSeries,
    TaylorSum,
    Quadrature2D,
    Radial1D,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormResult {
    pub value_sq: f64,
    pub method: NormMethod,
    pub error_estimate: f64,
}

impl NormResult {
    pub fn norm(&self) -> f64 {
        self.value_sq.max(0.0).sqrt()
    }
}

/// `κ [N φ(0) + Σ_{j≠k} φ(ϑ_j - ϑ_k)]`; coincident poles contribute `φ(0)`.
pub fn norm_sq_gram(c: &PoleConfiguration, g: &Weight) -> Result<NormResult> {
    let (value, err) = gram_energy(c.angles(), None, g)?;
    Ok(NormResult {
        value_sq: value,
        method: NormMethod::GramSeries,
        error_estimate: err,
    })
}

/// `κ Σ_{j,k} m_j m_k φ(x_j - x_k)` for real masses (unit masses if `None`).
pub fn gram_energy(angles: &[f64], masses: Option<&[f64]>, g: &Weight) -> Result<(f64, f64)> {
    let n = angles.len();
    let mass = |j: usize| masses.map_or(1.0, |m| m[j]);
    let phi0 = g.phi_at_zero()?;
    let diag: f64 = (0..n).map(|j| mass(j) * mass(j)).sum::<f64>() * phi0;
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (mut s, mut a) = (0.0, 0.0);
            for k in j + 1..n {
                let v = mass(j) * mass(k) * g.phi(angles[j] - angles[k])?;
                s += v;
                a += v.abs();
            }
            Ok((s, a))
        })
        .collect::<Result<_>>()?;
    let off: f64 = rows.iter().map(|r| r.0).sum();
    let scale: f64 = diag.abs() + 2.0 * rows.iter().map(|r| r.1).sum::<f64>();
    let value = g.kappa * (diag + 2.0 * off);
    Ok((value, g.kappa * scale * 1e-12))
}

/// `κ Σ_{s≤K} |a_s|² c_s`, with the tail bounded by `κ · tail_sup² · Σ_{s>K} c_s`
/// where `tail_sup ≥ sup_{s>K} |a_s|`.
pub fn norm_sq_taylor(a: &[Complex64], g: &Weight, tail_sup: f64) -> Result<NormResult> {
    if a.is_empty() {
        return Err(Error::Domain("empty coefficient sequence".into()));
    }
    let m = MomentCoefficients::new(g, a.len() - 1)?;
    let value: f64 = a.iter().zip(&m.values).map(|(x, c)| x.norm_sqr() * c).sum();
    let tail = if tail_sup == 0.0 {
        0.0
    } else {
        tail_sup * tail_sup * m.tail_bound
    };
    Ok(NormResult {
        value_sq: g.kappa * value,
        method: NormMethod::TaylorSum,
        error_estimate: g.kappa * (tail + 1e-14 * value),
    })
}

/// Taylor engine on a simplest fraction truncated at degree `k`; `|a_s| ≤ N`.
pub fn norm_sq_taylor_fraction(c: &PoleConfiguration, g: &Weight, k: usize) -> Result<NormResult> {
    let a = taylor_coefficients_of(c.angles(), k);
    norm_sq_taylor(&a, g, c.len() as f64)
}

/// `‖Ψ_N‖² = κ N² ∫₀¹ (1-t)^{N-1} g(t) / (1 - (1-t)^N) dt`.
pub fn psi_norm_sq(n: usize, g: &Weight) -> Result<NormResult> {
    if n == 0 {
        return Err(Error::Domain("Ψ_N needs N ≥ 1".into()));
    }
    if n > PSI_N_CAP {
        return Err(Error::Capacity(format!(
            "N = {n} exceeds the radial-mesh cap {PSI_N_CAP}"
        )));
    }
    if !g.kernel_integrable {
        return Err(Error::Divergence("Ψ_N has infinite norm for this weight".into()));
    }
    let nf = n as f64;
    // B(t) = N² (1-t)^{N-1}/(1-(1-t)^N); t·B(t) → N as t → 0
    let b = |t: f64| {
        let l = (-t).ln_1p();
        nf * nf * ((nf - 1.0) * l).exp() / -(nf * l).exp_m1()
    };
    let eps = 2f64.powi(-100);
    let ladder = Ladder::geometric(eps, 1.0, 2.0).with_points(g.kinks());
    let body = gauss_kronrod_segments(|t| b(t) * g.g(t), ladder.points(), Tolerance::new(0.0, 1e-13))?;
    let bottom = nf * g.kernel_integral(eps)?;
    Ok(NormResult {
        value_sq: g.kappa * (body.value + bottom),
        method: NormMethod::Radial1D,
        error_estimate: g.kappa * (body.error + nf * nf * eps * g.g(eps)),
    })
}

/// Distinct pole angles (sorted) with integer multiplicities.
#[derive(Clone, Debug)]
pub struct PointMasses {
    pub angles: Vec<f64>,
    pub masses: Vec<f64>,
}

impl PointMasses {
    pub fn from_configuration(c: &PoleConfiguration) -> PointMasses {
        PointMasses::signed(c.angles(), &vec![1.0; c.len()])
    }

    /// Merge exactly coincident angles, adding their masses.
    pub fn signed(angles: &[f64], masses: &[f64]) -> PointMasses {
        let mut pairs: Vec<(f64, f64)> = angles
            .iter()
            .map(|a| a.rem_euclid(TAU))
            .zip(masses.iter().copied())
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (mut out_a, mut out_m): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        for (a, m) in pairs {
            if out_a.last() == Some(&a) {
                *out_m.last_mut().unwrap() += m;
            } else {
                out_a.push(a);
                out_m.push(m);
            }
        }
        PointMasses {
            angles: out_a,
            masses: out_m,
        }
    }

    fn diagonal(&self) -> f64 {
        self.masses.iter().map(|m| m * m).sum()
    }

    /// Closed form of the circle mean `(1/2π)∫|h(re^{iθ})|² dθ`,
    /// `Σ_{j,k} m_j m_k Re[ā_j a_k/(1 - r² ā_j a_k)]`. Test oracle only.
    pub fn circle_mean_closed_form(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for (aj, mj) in self.angles.iter().zip(&self.masses) {
            for (ak, mk) in self.angles.iter().zip(&self.masses) {
                let d = ak - aj;
                let w = Complex64::from_polar(1.0, d);
                // 1 - r² w = (1 - w) + t w, with 1 - w = 2 sin²(d/2) - i sin d
                let h = (0.5 * d).sin();
                let one_minus_w = Complex64::new(2.0 * h * h, -d.sin());
                s += mj * mk * (w / (one_minus_w + t * w)).re;
            }
        }
        s
    }

    /// `A(t) = (1/2π) ∫₀^{2π} |h(r e^{iθ})|² dθ` with `r = √(1-t)`, by
    /// adaptive Gauss–Kronrod over the half-arcs between poles. Each
    /// half-arc is parametrized from its pole by `x = u sinh w`, `u = 1 - r`,
    /// which flattens the `1/(u² + x²)` peak.
    pub fn circle_mean(&self, t: f64) -> Result<f64> {
        let u = t / (1.0 + (1.0 - t).sqrt());
        let r = 1.0 - u;
        let n = self.angles.len();
        let rot: Vec<Complex64> = self
            .angles
            .iter()
            .zip(&self.masses)
            .map(|(a, m)| m * Complex64::from_polar(1.0, -a))
            .collect();
        // sin/cos of D = ϑ_p - ϑ_k and D/2, so δ = D + x needs no trig per term
        let trig: Vec<Vec<[f64; 4]>> = (0..n)
            .map(|p| {
                (0..n)
                    .map(|k| {
                        let d = self.angles[p] - self.angles[k];
                        let (s, c) = d.sin_cos();
                        let (sh, ch) = (0.5 * d).sin_cos();
                        [s, c, sh, ch]
                    })
                    .collect()
            })
            .collect();
        let value_at = |p: usize, x: f64| -> f64 {
            let (sx, cx) = x.sin_cos();
            let (shx, chx) = (0.5 * x).sin_cos();
            let mut sum = Complex64::new(0.0, 0.0);
            for (k, tr) in trig[p].iter().enumerate() {
                let sin_d = tr[0] * cx + tr[1] * sx;
                let s = tr[2] * chx + tr[3] * shx;
                let w = Complex64::new(-r * 2.0 * s * s - u, r * sin_d);
                sum += rot[k] / w;
            }
            sum.norm_sqr()
        };
        // rounding level of |h|² where h is tiny (near r = 0 for Ψ_N)
        let abs_floor = 1e-15 * self.masses.iter().map(|m| m.abs()).sum::<f64>().powi(2);
        let mut total = 0.0;
        for p in 0..n {
            let next = if p + 1 < n {
                self.angles[p + 1]
            } else {
                self.angles[0] + TAU
            };
            let prev = if p > 0 {
                self.angles[p - 1]
            } else {
                self.angles[n - 1] - TAU
            };
            for (half, dir) in [
                (0.5 * (next - self.angles[p]), 1.0),
                (0.5 * (self.angles[p] - prev), -1.0),
            ] {
                if half <= 0.0 {
                    continue;
                }
                let w_max = (half / u).asinh();
                let mut pts = vec![0.0];
                for frac in [1.0 / 64.0, 1.0 / 8.0, 0.5] {
                    let w = (frac * half / u).asinh();
                    if w > *pts.last().unwrap() + 1e-3 && w < w_max - 1e-3 {
                        pts.push(w);
                    }
                }
                pts.push(w_max);
                let r = gauss_kronrod_segments(
                    |w| {
                        let x = u * w.sinh();
                        value_at(p, dir * x) * u * w.cosh()
                    },
                    &pts,
                    Tolerance::new(abs_floor * half, 1e-12),
                )?;
                total += r.value;
            }
        }
        Ok(total / TAU)
    }
}

/// Smallest `t = 1 - r²` resolved by the shell mesh; below it the exact
/// diagonal asymptote `A(t) ≈ Σ m²/t` is integrated in closed form.
const T_MIN: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^{-53}

/// 2-D quadrature of the defining integral. In `t = 1 - r²`,
/// `‖h‖² = κ ∫₀¹ A(t) g(t) dt` where `A` is the circle mean of `|h|²`.
pub fn norm_sq_quadrature(c: &PoleConfiguration, g: &Weight) -> Result<NormResult> {
    Ok(norm_sq_quadrature_multi(c, std::slice::from_ref(g))?[0])
}

/// As [`norm_sq_quadrature`] for several weights; the circle means are
/// computed once on the union of the weights' meshes.
pub fn norm_sq_quadrature_multi(c: &PoleConfiguration, weights: &[Weight]) -> Result<Vec<NormResult>> {
    let pm = PointMasses::from_configuration(c);
    quadrature_engine(&pm, weights)
}

pub fn quadrature_engine(pm: &PointMasses, weights: &[Weight]) -> Result<Vec<NormResult>> {
    for g in weights {
        if !g.kernel_integrable && pm.diagonal() > 0.0 {
            return Err(Error::Divergence(
                "∫₀ g(s)/s ds = ∞: the fraction is not in the space".into(),
            ));
        }
    }
    // dyadic shells [2^{-j-1}, 2^{-j}] down to T_MIN, split at every kink
    let mut pts: Vec<f64> = (0..=53).map(|j| 2f64.powi(-j)).collect();
    pts.extend(weights.iter().flat_map(|g| g.kinks()));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let panels: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    let nodes: Vec<Vec<(f64, f64, f64)>> = panels.iter().map(|&(a, b)| kronrod_nodes(a, b)).collect();
    let flat: Vec<f64> = nodes.iter().flatten().map(|n| n.0).collect();
    let means: Vec<f64> = flat.par_iter().map(|&t| pm.circle_mean(t)).collect::<Result<_>>()?;

    // cross terms are bounded by Σ_{j≠k} |m_j m_k| / (2 sin(d_jk/2))
    let n = pm.angles.len();
    let mut cross = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                let d = (0.5 * (pm.angles[j] - pm.angles[k])).sin().abs();
                cross += (pm.masses[j] * pm.masses[k]).abs() / (2.0 * d);
            }
        }
    }

    weights
        .iter()
        .map(|g| {
            let (mut value, mut error) = (0.0, 0.0);
            let mut idx = 0;
            for panel in &nodes {
                let (mut k, mut gs) = (0.0, 0.0);
                for &(t, wk, wg) in panel {
                    let v = means[idx] * g.g(t);
                    k += wk * v;
                    gs += wg * v;
                    idx += 1;
                }
                value += k;
                error += (k - gs).abs();
            }
            let tail = pm.diagonal() * g.kernel_integral(T_MIN)?;
            let tail_err = cross * T_MIN * g.g(T_MIN);
            Ok(NormResult {
                value_sq: g.kappa * (value + tail),
                method: NormMethod::Quadrature2D,
                error_estimate: g.kappa * (error + tail_err),
            })
        })
        .collect()
}

/// `(1/2π) ∫ |Σ 1/(z - a_k)|² dθ` over `|z| = r`: shorthand used by tests.
pub fn circle_mean_sq(c: &PoleConfiguration, r: f64) -> Result<f64> {
    PointMasses::from_configuration(c).circle_mean(1.0 - r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn closed_form_anchors() {
        let g = Weight::power(1.0).unwrap();
        let single = PoleConfiguration::new(vec![0.3]).unwrap();
        assert!((norm_sq_gram(&single, &g).unwrap().value_sq - 2.0).abs() < 1e-14);
        let two = PoleConfiguration::equispaced(2);
        let exact = 8.0 * (1.0 - LN2);
        assert!((norm_sq_gram(&two, &g).unwrap().value_sq - exact).abs() < 1e-13);
        assert!((psi_norm_sq(1, &g).unwrap().value_sq - 2.0).abs() < 1e-12);
        assert!((psi_norm_sq(2, &g).unwrap().value_sq - exact).abs() < 1e-12);
    }

    #[test]
    fn circle_mean_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 9] {
            let c = PoleConfiguration::random(n, &mut rng);
            let pm = PointMasses::from_configuration(&c);
            for t in [0.9, 0.3, 1e-2, 1e-5, 1e-9, 1e-14] {
                let q = pm.circle_mean(t).unwrap();
                let exact = pm.circle_mean_closed_form(t);
                assert!((q - exact).abs() < 1e-10 * exact, "n={n} t={t}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn taylor_engine_examples() {
        let g = Weight::power(1.0).unwrap();
        let ones = vec![Complex64::new(-1.0, 0.0); 2001];
        let r = norm_sq_taylor(&ones, &g, 1.0).unwrap();
        assert!((r.value_sq - 2.0).abs() <= r.error_estimate + 1e-12);
        let one = [Complex64::new(1.0, 0.0)];
        assert!((norm_sq_taylor(&one, &g, 0.0).unwrap().value_sq - 1.0).abs() < 1e-15);
        let t = norm_sq_taylor_fraction(&PoleConfiguration::equispaced(3), &g, 3000).unwrap();
        let p = psi_norm_sq(3, &g).unwrap();
        assert!((t.value_sq - p.value_sq).abs() <= t.error_estimate + 1e-10);
    }

    #[test]
    fn psi_radial_matches_gram() {
        for g in [
            Weight::power(0.5).unwrap(),
            Weight::power(2.0).unwrap(),
            Weight::log_power(2.0).unwrap(),
        ] {
            for n in [1, 2, 3, 7, 16] {
                let radial = psi_norm_sq(n, &g).unwrap().value_sq;
                let gram = norm_sq_gram(&PoleConfiguration::equispaced(n), &g).unwrap().value_sq;
                assert!((radial - gram).abs() < 1e-8 * gram, "{g} N={n}: {radial} vs {gram}");
            }
        }
    }

    #[test]
    fn psi_cap() {
        let g = Weight::power(1.0).unwrap();
        assert!(matches!(psi_norm_sq(PSI_N_CAP + 1, &g), Err(Error::Capacity(_))));
    }

    #[test]
    fn quadrature_matches_gram_small() {
        let g = Weight::power(1.0).unwrap();
        let q = norm_sq_quadrature(&PoleConfiguration::equispaced(2), &g).unwrap();
        assert!((q.value_sq - 8.0 * (1.0 - LN2)).abs() < 1e-8, "{q:?}");
        let q = norm_sq_quadrature(&PoleConfiguration::new(vec![1.0]).unwrap(), &g).unwrap();
        assert!((q.value_sq - 2.0).abs() < 1e-8, "{q:?}");
    }

    #[test]
    fn coincident_poles_count_mass_squared() {
        let g = Weight::power(0.5).unwrap();
        let c = PoleConfiguration::new(vec![1.0, 1.0, 3.0]).unwrap();
        let gram = norm_sq_gram(&c, &g).unwrap().value_sq;
        let quad = norm_sq_quadrature(&c, &g).unwrap().value_sq;
        assert!((gram - quad).abs() < 1e-7 * gram);
    }
}
