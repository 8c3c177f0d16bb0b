//! Radial weights `g` on `[0, 1]`, their moments `c_k = ∫₀¹ (1-u)^k g(u) du`
//! and the interaction kernel `φ_g(t) = Σ_k c_k cos((k+1)t)`.
//!
//! Away from the closed forms, `φ_g` and its derivatives are computed from
//! integral representations in `u = 1 - s`, with `a = 2 sin²(t/2)`:
//!
//! ```text
//! φ(t)   =  ∫₀¹ (u - a) g(u) / D du,             D = u² + 2(1-u)a
//! φ'(t)  = -sin t ∫₀¹ u(2 - u) g(u) / D² du
//! φ''(t) =  ∫₀¹ (1-u) [a(2 - 2u + u²) - u²] g'(u) / D² du
//! ```

use std::f64::consts::{LN_2, PI, TAU};
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_kronrod_segments, tanh_sinh, Ladder, QuadResult, Tolerance};
use crate::special::exp_integral_e1;

/// Upper end of the `y = -ln u` range; below `e^{-700}` closed forms take over.
const Y_MAX: f64 = 700.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `g(t) = t^α`
    PowerAlpha { alpha: f64 },
    /// `g(t) = log^{-q}(2/t)`
    LogPower { q: f64 },
    /// `g(t) = exp(-t^{-q})`
    ExpPower { q: f64 },
    /// `g(t) = min(δ, t)`
    MinDelta { delta: f64 },
    /// Piecewise-linear interpolation of samples `(t_i, g_i)`, `t_0 = 0`, `t_last = 1`.
    Tabulated { t: Vec<f64>, g: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Weight {
    pub family: Family,
    pub kappa: f64,
    pub is_concave_nondecreasing: bool,
    pub kernel_integrable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub grid_size: usize,
    pub min_value: f64,
    pub argmin: f64,
    pub all_positive: bool,
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

impl Weight {
    pub fn power(alpha: f64) -> Result<Weight> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("power weight needs alpha > 0, got {alpha}")));
        }
        Ok(Weight {
            family: Family::PowerAlpha { alpha },
            kappa: alpha + 1.0,
            is_concave_nondecreasing: alpha <= 1.0,
            kernel_integrable: true,
        })
    }

    pub fn log_power(q: f64) -> Result<Weight> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(domain(format!(
                "log-power weight needs q > 1 for ∫ g(s)/s ds < ∞, got {q}"
            )));
        }
        Self::finish(Family::LogPower { q }, false)
    }

    pub fn exp_power(q: f64) -> Result<Weight> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(domain(format!("exp-power weight needs q > 0, got {q}")));
        }
        Self::finish(Family::ExpPower { q }, false)
    }

    pub fn min_delta(delta: f64) -> Result<Weight> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(domain(format!("min weight needs 0 < delta <= 1, got {delta}")));
        }
        Ok(Weight {
            family: Family::MinDelta { delta },
            kappa: 1.0 / (delta - 0.5 * delta * delta),
            is_concave_nondecreasing: true,
            kernel_integrable: true,
        })
    }

    pub fn tabulated(t: Vec<f64>, g: Vec<f64>) -> Result<Weight> {
        if t.len() != g.len() || t.len() < 2 {
            return Err(domain("tabulated weight needs at least two (t, g) samples"));
        }
        if t[0] != 0.0 || *t.last().unwrap() != 1.0 {
            return Err(domain("tabulated grid must start at t = 0 and end at t = 1"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("tabulated grid must be strictly increasing"));
        }
        if g.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(domain("tabulated values must be finite and non-negative"));
        }
        if g.iter().all(|v| *v == 0.0) {
            return Err(domain("tabulated weight vanishes identically"));
        }
        let slopes: Vec<f64> = t
            .windows(2)
            .zip(g.windows(2))
            .map(|(tw, gw)| (gw[1] - gw[0]) / (tw[1] - tw[0]))
            .collect();
        let scale = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let slack = 1e-12 * scale;
        let concave = slopes.windows(2).all(|w| w[1] <= w[0] + slack);
        let nondecreasing = slopes.iter().all(|s| *s >= -slack);
        Self::finish(Family::Tabulated { t, g }, concave && nondecreasing)
    }

    /// Load a two-column CSV `t,g(t)`; a non-numeric first row is taken as a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Weight> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path.as_ref())?;
        let (mut ts, mut gs) = (Vec::new(), Vec::new());
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Parse(format!("row {}: expected two columns", row + 1)));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(g)) => {
                    ts.push(t);
                    gs.push(g);
                }
                _ if row == 0 => continue,
                _ => return Err(Error::Parse(format!("row {}: not a number", row + 1))),
            }
        }
        Weight::tabulated(ts, gs)
    }

    /// Parse `alpha:x`, `logpow:q`, `exppow:q`, `min:δ` or `table:path.csv`.
    pub fn parse(spec: &str) -> Result<Weight> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::Usage(format!("weight spec `{spec}` has no `kind:value` form")))?;
        let number = || {
            arg.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("weight parameter `{arg}` is not a number")))
        };
        match kind.trim() {
            "alpha" => Weight::power(number()?),
            "logpow" => Weight::log_power(number()?),
            "exppow" => Weight::exp_power(number()?),
            "min" => Weight::min_delta(number()?),
            "table" => Weight::from_csv(arg.trim()),
            other => Err(Error::Usage(format!("unknown weight kind `{other}`"))),
        }
    }

    fn finish(family: Family, concave_nondecreasing: bool) -> Result<Weight> {
        let mut w = Weight {
            family,
            kappa: 1.0,
            is_concave_nondecreasing: concave_nondecreasing,
            kernel_integrable: false,
        };
        w.kernel_integrable = w.check_kernel_integrability();
        w.kappa = 1.0 / w.mass()?;
        Ok(w)
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::PowerAlpha { alpha } => Some(alpha),
            _ => None,
        }
    }

    fn is_alpha_one(&self) -> bool {
        self.alpha() == Some(1.0)
    }

    /// `g(t)`, with `t` clamped to `[0, 1]`.
    pub fn g(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match &self.family {
            Family::PowerAlpha { alpha } => t.powf(*alpha),
            Family::LogPower { q } => {
                if t == 0.0 {
                    0.0
                } else {
                    (2.0 / t).ln().powf(-q)
                }
            }
            Family::ExpPower { q } => {
                if t == 0.0 {
                    0.0
                } else {
                    (-t.powf(-q)).exp()
                }
            }
            Family::MinDelta { delta } => t.min(*delta),
            Family::Tabulated { t: ts, g } => {
                let i = segment_index(ts, t);
                let s = (t - ts[i]) / (ts[i + 1] - ts[i]);
                g[i] + s * (g[i + 1] - g[i])
            }
        }
    }

    /// `g'(t)` for `t ∈ (0, 1]`; one-sided (right) derivative at kinks.
    pub fn g_prime(&self, t: f64) -> f64 {
        match &self.family {
            Family::PowerAlpha { alpha } => alpha * t.powf(alpha - 1.0),
            Family::LogPower { q } => {
                let l = (2.0 / t).ln();
                q * l.powf(-q - 1.0) / t
            }
            Family::ExpPower { q } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let s = t.powf(-q);
                q * (-s - (q + 1.0) * t.ln()).exp()
            }
            Family::MinDelta { delta } => {
                if t < *delta {
                    1.0
                } else {
                    0.0
                }
            }
            Family::Tabulated { t: ts, g } => {
                let i = segment_index(ts, t.clamp(0.0, 1.0));
                (g[i + 1] - g[i]) / (ts[i + 1] - ts[i])
            }
        }
    }

    /// Points in `(0, 1)` where `g` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.family {
            Family::MinDelta { delta } if *delta < 1.0 => vec![*delta],
            Family::Tabulated { t, .. } => t[1..t.len() - 1].to_vec(),
            _ => Vec::new(),
        }
    }

    /// `g(t) = o(t)` as `t → 0`.
    pub fn is_little_o_of_t(&self) -> bool {
        match &self.family {
            Family::PowerAlpha { alpha } => *alpha > 1.0,
            Family::ExpPower { .. } => true,
            Family::LogPower { .. } | Family::MinDelta { .. } => false,
            Family::Tabulated { t, g } => g[0] == 0.0 && g[1] == 0.0 && t.len() > 2,
        }
    }

    /// `∫₀¹ g`.
    pub fn mass(&self) -> Result<f64> {
        match &self.family {
            Family::PowerAlpha { alpha } => Ok(1.0 / (alpha + 1.0)),
            Family::MinDelta { delta } => Ok(delta - 0.5 * delta * delta),
            Family::Tabulated { t, g } => Ok(t
                .windows(2)
                .zip(g.windows(2))
                .map(|(tw, gw)| 0.5 * (tw[1] - tw[0]) * (gw[0] + gw[1]))
                .sum()),
            _ => Ok(self.log_scale_integral(|_, u| self.g(u) * u, &[], 1e-13)?.value),
        }
    }

    /// `∫₀^b g(t)/t dt`; closed form for every family.
    pub fn kernel_integral(&self, b: f64) -> Result<f64> {
        if !(b > 0.0) {
            return Ok(0.0);
        }
        let b = b.min(1.0);
        match &self.family {
            Family::PowerAlpha { alpha } => Ok(b.powf(*alpha) / alpha),
            Family::LogPower { q } => Ok((2.0 / b).ln().powf(1.0 - q) / (q - 1.0)),
            Family::ExpPower { q } => Ok(exp_integral_e1(b.powf(-q)) / q),
            Family::MinDelta { delta } => Ok(if b <= *delta {
                b
            } else {
                delta + delta * (b / delta).ln()
            }),
            Family::Tabulated { t, g } => {
                if g[0] != 0.0 {
                    return Err(Error::Divergence(
                        "tabulated weight has g(0) > 0, so ∫₀ g(s)/s ds diverges".into(),
                    ));
                }
                let mut total = 0.0;
                for i in 0..t.len() - 1 {
                    let (t1, t2) = (t[i], t[i + 1].min(b));
                    if t1 >= b {
                        break;
                    }
                    let m = (g[i + 1] - g[i]) / (t[i + 1] - t[i]);
                    let c = g[i] - m * t1;
                    total += m * (t2 - t1);
                    if t1 > 0.0 {
                        total += c * (t2 / t1).ln();
                    }
                }
                Ok(total)
            }
        }
    }

    /// Whether `∫₀ g(s)/s ds < ∞` (analytic answer per family).
    pub fn check_kernel_integrability(&self) -> bool {
        match &self.family {
            Family::LogPower { q } => *q > 1.0,
            Family::Tabulated { g, .. } => g[0] == 0.0,
            _ => true,
        }
    }

    /// `∫₀¹ F(y, u) dy`-style integration after `u = e^{-y}`: computes
    /// `∫₀^∞ f(y, e^{-y}) dy` over a doubling ladder in `y` that also
    /// contains `-ln` of every kink and the given extra breakpoints.
    fn log_scale_integral<F: Fn(f64, f64) -> f64>(&self, f: F, extra: &[f64], rel: f64) -> Result<QuadResult> {
        let mut pts = vec![0.0];
        let mut y = 0.125;
        while y < Y_MAX {
            pts.push(y);
            y *= 2.0;
        }
        pts.push(Y_MAX);
        let ladder = Ladder(pts).with_points(self.kinks().into_iter().map(|k| -k.ln()).chain(extra.iter().copied()));
        gauss_kronrod_segments(|y| f(y, (-y).exp()), ladder.points(), Tolerance::new(0.0, rel))
    }

    /// `c_k = ∫₀¹ (1-u)^k g(u) du`.
    pub fn moment_coefficient(&self, k: usize) -> Result<f64> {
        match &self.family {
            Family::PowerAlpha { alpha } => Ok(beta_moment(*alpha, k)),
            Family::MinDelta { delta } => Ok(min_delta_moment(*delta, k)),
            _ => {
                let kf = k as f64;
                let centre = (kf + 1.0).ln();
                let extra = [centre - 2.0, centre - 1.0, centre, centre + 1.0, centre + 2.0];
                let r = self.log_scale_integral(
                    |_, u| {
                        let base = if u < 0.5 { (-u).ln_1p() } else { (1.0 - u).ln() };
                        (kf * base).exp() * self.g(u) * u
                    },
                    &extra,
                    1e-12,
                )?;
                if r.error > 1e-10 * r.value.abs() {
                    return Err(Error::Quadrature {
                        achieved: r.error / r.value.abs(),
                        requested: 1e-10,
                    });
                }
                Ok(r.value)
            }
        }
    }

    /// `Σ_{k>K} c_k = ∫₀¹ (1-u)^{K+1} g(u)/u du`.
    pub fn moment_tail(&self, big_k: usize) -> Result<f64> {
        if !self.kernel_integrable {
            return Ok(f64::INFINITY);
        }
        let e = (big_k + 1) as f64;
        let centre = (e + 1.0).ln();
        let extra = [centre - 2.0, centre - 1.0, centre, centre + 1.0, centre + 2.0];
        // below u = e^{-Y_MAX}, (1-u)^{K+1} = 1 to working precision
        let deep = self.kernel_integral((-Y_MAX).exp())?;
        Ok(deep
            + self
                .log_scale_integral(
                    |_, u| {
                        let base = if u < 0.5 { (-u).ln_1p() } else { (1.0 - u).ln() };
                        (e * base).exp() * self.g(u)
                    },
                    &extra,
                    1e-10,
                )?
                .value)
    }

    /// `φ_g(t)`: closed form for `α = 1`, integral form otherwise.
    pub fn phi(&self, t: f64) -> Result<f64> {
        let (t, _) = reduce_angle(t);
        if t == 0.0 {
            return self.phi_at_zero();
        }
        if self.is_alpha_one() {
            return Ok(phi_alpha_one(t));
        }
        self.phi_integral(t)
    }

    /// `φ_g(0) = ∫₀¹ g(u)/u du`; a divergence error when that is infinite.
    pub fn phi_at_zero(&self) -> Result<f64> {
        if !self.kernel_integrable {
            return Err(Error::Divergence(
                "∫₀ g(s)/s ds = ∞, so φ_g(0) and single-kernel norms are infinite".into(),
            ));
        }
        self.kernel_integral(1.0)
    }

    /// `φ_g(t)` from the integral representation, any family.
    pub fn phi_integral(&self, t: f64) -> Result<f64> {
        let (t, _) = reduce_angle(t);
        if t == 0.0 {
            return self.phi_at_zero();
        }
        let a = half_chord_sq(t);
        self.kernel_quadrature(a, |u| (u - a) * self.g(u) / denom(u, a))
    }

    /// `φ'_g(t)`; odd, and `0` at `t ≡ 0` (symmetric derivative).
    pub fn phi_derivative(&self, t: f64) -> Result<f64> {
        let (t, sign) = reduce_angle(t);
        if t == 0.0 || t == PI {
            return Ok(0.0);
        }
        if self.is_alpha_one() {
            return Ok(sign * phi_prime_alpha_one(t));
        }
        Ok(sign * self.phi_derivative_integral(t)?)
    }

    /// `(φ_g(t), φ'_g(t))`, sharing the trigonometry in the `α = 1` case.
    pub fn phi_with_derivative(&self, t: f64) -> Result<(f64, f64)> {
        let (r, sign) = reduce_angle(t);
        if r == 0.0 {
            return Ok((self.phi_at_zero()?, 0.0));
        }
        if self.is_alpha_one() {
            let (s, c) = (0.5 * r).sin_cos();
            let l = (2.0 * s).ln();
            let value = 1.0 - 2.0 * s * s * l + (r - PI) * s * c;
            if r == PI {
                return Ok((value, 0.0));
            }
            let slope = -2.0 * l * s * c + 0.5 * (r - PI) * (1.0 - 2.0 * s * s);
            return Ok((value, sign * slope));
        }
        let value = self.phi_integral(r)?;
        if r == PI {
            return Ok((value, 0.0));
        }
        Ok((value, sign * self.phi_derivative_integral(r)?))
    }

    /// `φ'_g(t)` for `t ∈ (0, π)` from the integral representation.
    pub fn phi_derivative_integral(&self, t: f64) -> Result<f64> {
        let a = half_chord_sq(t);
        let f = |u: f64| {
            let d = denom(u, a);
            u * (2.0 - u) * self.g(u) / (d * d)
        };
        let j = self.kernel_quadrature(a, f)?;
        Ok(-t.sin() * j)
    }

    /// `φ''_g(t)` for `t ∈ (0, 2π)`, from the integral in `g'`.
    pub fn phi_second_derivative(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < TAU) {
            return Err(domain(format!("φ'' is evaluated on (0, 2π), got t = {t}")));
        }
        let t = if t > PI { TAU - t } else { t };
        let a = half_chord_sq(t);
        let kernel = |u: f64| {
            let d = denom(u, a);
            (1.0 - u) * (a * (2.0 - 2.0 * u + u * u) - u * u) / (d * d)
        };
        let k0 = kernel(0.0);
        let b = self.head_end(a);
        // On [0, b] write K = K(0) + (K - K(0)) so that g' only appears
        // against a factor vanishing at 0.
        let lead = k0 * (self.g(b) - self.g(0.0));
        // the correction is small against `lead`, so its tolerance follows `lead`
        let head = lead
            + tanh_sinh(
                |u, _| (kernel(u) - k0) * self.g_prime(u),
                0.0,
                b,
                Tolerance::new((1e-13 * lead.abs()).max(1e-16), 1e-12),
            )?
            .value;
        let ladder = Ladder::geometric(b, 1.0, 4.0).with_points(self.kinks());
        let body = gauss_kronrod_segments(
            |u| kernel(u) * self.g_prime(u),
            ladder.points(),
            Tolerance::new(1e-15, 1e-12),
        )?;
        Ok(head + body.value)
    }

    /// Evaluate `φ''` on the uniform grid `t_i = 2π i/(n+1)`, `i = 1..n`.
    pub fn check_strict_convexity(&self, grid_size: usize) -> Result<ConvexityReport> {
        if grid_size < 100 {
            return Err(domain("convexity grid needs at least 100 points"));
        }
        let n = grid_size;
        let h = TAU / (n + 1) as f64;
        // φ'' is even about π; evaluate the first half and mirror.
        let half = n.div_ceil(2);
        let values: Vec<f64> = (1..=half)
            .into_par_iter()
            .map(|i| {
                let t = i as f64 * h;
                if self.is_alpha_one() {
                    Ok(phi_second_alpha_one(t))
                } else {
                    self.phi_second_derivative(t)
                }
            })
            .collect::<Result<_>>()?;
        let (mut min_value, mut argmin) = (f64::INFINITY, 0.0);
        for (j, v) in values.iter().enumerate() {
            if *v < min_value {
                min_value = *v;
                argmin = (j + 1) as f64 * h;
            }
        }
        Ok(ConvexityReport {
            grid_size: n,
            min_value,
            argmin,
            all_positive: min_value > 0.0,
        })
    }

    /// End of the tanh–sinh head panel: `a/4`, kept left of every kink.
    fn head_end(&self, a: f64) -> f64 {
        self.kinks().into_iter().fold(0.25 * a, f64::min)
    }

    /// Integrate a kernel integrand with structure at `u ~ a` and `u ~ √a`:
    /// tanh–sinh on `[0, a/4]`, then a ratio-4 ladder to 1.
    fn kernel_quadrature<F: Fn(f64) -> f64>(&self, a: f64, f: F) -> Result<f64> {
        let b = self.head_end(a);
        let first = tanh_sinh(|u, _| f(u), 0.0, b, Tolerance::new(1e-15, 1e-11))?;
        let ladder = Ladder::geometric(b, 1.0, 4.0).with_points(self.kinks());
        let body = gauss_kronrod_segments(f, ladder.points(), Tolerance::new(1e-16, 1e-12))?;
        Ok(first.value + body.value)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::PowerAlpha { alpha } => write!(f, "alpha:{alpha}"),
            Family::LogPower { q } => write!(f, "logpow:{q}"),
            Family::ExpPower { q } => write!(f, "exppow:{q}"),
            Family::MinDelta { delta } => write!(f, "min:{delta}"),
            Family::Tabulated { t, .. } => write!(f, "table[{} samples]", t.len()),
        }
    }
}

fn segment_index(ts: &[f64], t: f64) -> usize {
    match ts.binary_search_by(|p| p.total_cmp(&t)) {
        Ok(i) => i.min(ts.len() - 2),
        Err(i) => i.saturating_sub(1).min(ts.len() - 2),
    }
}

/// Reduce to `[0, π]` using evenness; the sign is that of an odd function.
fn reduce_angle(t: f64) -> (f64, f64) {
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let r = t.abs().rem_euclid(TAU);
    if r > PI {
        (TAU - r, -sign)
    } else {
        (r, sign)
    }
}

/// `2 sin²(t/2) = 1 - cos t`, without cancellation.
fn half_chord_sq(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    2.0 * s * s
}

fn denom(u: f64, a: f64) -> f64 {
    u * u + 2.0 * (1.0 - u) * a
}

/// `∫₀¹ (1-u)^k u^α du = B(k+1, α+1)`.
pub fn beta_moment(alpha: f64, k: usize) -> f64 {
    if k <= 20_000 {
        let mut c = 1.0 / (alpha + 1.0);
        for j in 1..=k {
            let j = j as f64;
            c *= j / (j + alpha + 1.0);
        }
        c
    } else {
        use crate::special::ln_gamma;
        let kf = k as f64;
        (ln_gamma(kf + 1.0) + ln_gamma(alpha + 1.0) - ln_gamma(kf + alpha + 2.0)).exp()
    }
}

/// `∫₀¹ (1-u)^k min(δ, u) du`.
pub fn min_delta_moment(delta: f64, k: usize) -> f64 {
    let m = (k + 1) as f64;
    // (1-δ)^{k+1}
    let p = (m * (-delta).ln_1p()).exp();
    delta * p / m + (1.0 - p * (1.0 + delta * m)) / (m * (m + 1.0))
}

/// `φ₁(t) = 1 - 2 sin²(t/2) ln(2 sin(t/2)) + (t - π) sin t / 2` on `(0, 2π)`.
pub fn phi_alpha_one(t: f64) -> f64 {
    let (t, _) = reduce_angle(t);
    if t == 0.0 {
        return 1.0;
    }
    let s = (0.5 * t).sin();
    1.0 - 2.0 * s * s * (2.0 * s).ln() + 0.5 * (t - PI) * t.sin()
}

/// `φ₁'(t) = -ln(2 sin(t/2)) sin t + (t - π) cos t / 2` on `(0, 2π)`.
pub fn phi_prime_alpha_one(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    -(2.0 * s).ln() * t.sin() + 0.5 * (t - PI) * t.cos()
}

/// `φ₁''(t) = ½ + Σ_{k≥1} cos(kt)/(k+1)
///          = -½ - ln(2 sin(t/2)) cos t - (t - π) sin t / 2` on `(0, 2π)`.
pub fn phi_second_alpha_one(t: f64) -> f64 {
    let s = (0.5 * t).sin();
    -0.5 - (2.0 * s).ln() * t.cos() - 0.5 * (t - PI) * t.sin()
}

/// Dyadic-shell test for `∫₀ g(s)/s ds < ∞` on a bare function: shells
/// `∫_{2^{-m-1}}^{2^{-m}} g(s)/s ds` are fitted to `m^{-p}` between
/// `m = 250` and `m = 1000`; summable iff `p > 1.1`.
pub fn dyadic_shells_summable<F: Fn(f64) -> f64>(g: F) -> bool {
    let shell = |m: f64| {
        let (y0, y1) = (m * LN_2, (m + 1.0) * LN_2);
        crate::quadrature::gauss_kronrod(|y| g((-y).exp()), y0, y1, Tolerance::new(0.0, 1e-10))
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let (s_lo, s_hi) = (shell(250.0), shell(1000.0));
    if s_hi == 0.0 {
        return true;
    }
    let p = (s_lo / s_hi).ln() / 4f64.ln();
    p > 1.1
}

/// Precomputed `c_0..c_K` with a certified bound on `Σ_{k>K} c_k`.
#[derive(Clone, Debug, Serialize)]
pub struct MomentCoefficients {
    pub values: Vec<f64>,
    pub truncation_k: usize,
    pub tail_bound: f64,
}

impl MomentCoefficients {
    pub fn new(g: &Weight, big_k: usize) -> Result<MomentCoefficients> {
        let values: Vec<f64> = match &g.family {
            Family::PowerAlpha { alpha } => {
                let mut v = Vec::with_capacity(big_k + 1);
                let mut c = 1.0 / (alpha + 1.0);
                v.push(c);
                for j in 1..=big_k {
                    let jf = j as f64;
                    c *= jf / (jf + alpha + 1.0);
                    v.push(c);
                }
                v
            }
            _ => (0..=big_k)
                .into_par_iter()
                .map(|k| g.moment_coefficient(k))
                .collect::<Result<_>>()?,
        };
        let tail_bound = match &g.family {
            // Σ_{k>K} B(k+1, α+1) = B(K+2, α)  (telescoping)
            Family::PowerAlpha { alpha } => beta_moment(alpha - 1.0, big_k + 1),
            _ => g.moment_tail(big_k)?,
        };
        Ok(MomentCoefficients {
            values,
            truncation_k: big_k,
            tail_bound,
        })
    }

    /// Partial cosine series `Σ_{k≤K} c_k cos((k+1)t)` and a bound on the
    /// discarded tail: `min(Σ_{k>K} c_k, c_{K+1}/|sin(t/2)|)`.
    pub fn phi_partial_sum(&self, t: f64) -> (f64, f64) {
        let (t, _) = reduce_angle(t);
        let sum = cosine_sum(&self.values, 0, t);
        let last = *self.values.last().unwrap_or(&0.0);
        let sin_half = (0.5 * t).sin().abs();
        let abel = if sin_half > 0.0 { last / sin_half } else { f64::INFINITY };
        (sum, self.tail_bound.min(abel))
    }

    /// Cosine series with the tail summed by the Euler transform
    /// `Σ_{n≥0} c_{m+n} z^n = Σ_j Δ^j c_m z^j/(1-z)^{j+1}`, `z = e^{it}`,
    /// using the last `EULER_TERMS + 1` stored coefficients. Returns the value
    /// and the size of the last transform term as an error estimate.
    /// For `t ≡ 0` this is the plain partial sum plus the certified tail.
    pub fn phi_series(&self, t: f64) -> (f64, f64) {
        const EULER_TERMS: usize = 5;
        let (t, _) = reduce_angle(t);
        if t == 0.0 || self.values.len() <= 2 * EULER_TERMS {
            let (s, tail) = self.phi_partial_sum(t);
            return if t == 0.0 && tail.is_finite() {
                (s + tail, 0.0)
            } else {
                (s, tail)
            };
        }
        let m = self.values.len() - 1 - EULER_TERMS;
        let head = cosine_sum(&self.values[..m], 0, t);
        let mut diffs: Vec<f64> = self.values[m..].to_vec();
        let z = Complex64::from_polar(1.0, t);
        let ratio = z / (Complex64::new(1.0, 0.0) - z);
        // z^{m+1} / (1 - z)
        let mut factor = Complex64::from_polar(1.0, (m + 1) as f64 * t) / (1.0 - z);
        let mut tail = Complex64::new(0.0, 0.0);
        let mut last_term = 0.0;
        for _ in 0..=EULER_TERMS {
            let term = factor * diffs[0];
            tail += term;
            last_term = term.norm();
            for i in 0..diffs.len() - 1 {
                diffs[i] = diffs[i + 1] - diffs[i];
            }
            diffs.pop();
            factor *= ratio;
            if diffs.is_empty() {
                break;
            }
        }
        (head + tail.re, last_term)
    }
}

fn cosine_sum(c: &[f64], offset: usize, t: f64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (k, ck) in c.iter().enumerate() {
        // Kahan summation; the series can run to 10⁵ terms
        let y = ck * ((k + offset + 1) as f64 * t).cos() - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_with_derivative_matches_separate_calls() {
        for w in [Weight::power(1.0).unwrap(), Weight::power(0.5).unwrap()] {
            for t in [-5.0, -1.0, 0.0, 0.3, PI, 4.0, 7.0] {
                let (v, d) = w.phi_with_derivative(t).unwrap();
                assert!((v - w.phi(t).unwrap()).abs() < 1e-13, "t = {t}");
                assert!((d - w.phi_derivative(t).unwrap()).abs() < 1e-13, "t = {t}");
            }
        }
    }

    #[test]
    fn power_kappa_is_alpha_plus_one() {
        for alpha in [0.25, 0.5, 1.0, 2.0, 3.5] {
            let w = Weight::power(alpha).unwrap();
            assert_eq!(w.kappa, alpha + 1.0);
            assert!((w.kappa * w.mass().unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_mass_matches_closed_forms() {
        // ∫₀¹ log^{-2}(2/t) dt = 2 Γ(-1, ln 2) = 2 (1/ln2 · 1/2 ... ) via E1
        let w = Weight::log_power(2.0).unwrap();
        // 2∫_{ln2}^∞ e^{-s} s^{-2} ds = 2 (e^{-ln2}/ln2 - E1(ln2))
        let exact = 2.0 * (0.5 / LN_2 - exp_integral_e1(LN_2));
        assert!((w.mass().unwrap() - exact).abs() < 1e-13);
        // ∫₀¹ exp(-1/t) dt = e^{-1} - E1(1)
        let w = Weight::exp_power(1.0).unwrap();
        let exact = (-1.0f64).exp() - exp_integral_e1(1.0);
        assert!((w.mass().unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Weight::power(0.0).is_err());
        assert!(Weight::log_power(1.0).is_err());
        assert!(Weight::exp_power(-1.0).is_err());
        assert!(Weight::min_delta(0.0).is_err());
        assert!(Weight::tabulated(vec![0.0, 0.5], vec![0.0, 1.0]).is_err());
        assert!(Weight::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn parse_round_trips_display() {
        for spec in ["alpha:1", "logpow:2", "exppow:0.5", "min:0.3"] {
            let w = Weight::parse(spec).unwrap();
            assert_eq!(w.to_string(), spec);
        }
        assert!(matches!(Weight::parse("beta:1"), Err(Error::Usage(_))));
        assert!(matches!(Weight::parse("alpha"), Err(Error::Usage(_))));
    }

    #[test]
    fn moment_examples() {
        let w = Weight::power(1.0).unwrap();
        for k in 0..50 {
            let exact = 1.0 / ((k + 1) as f64 * (k + 2) as f64);
            assert!((w.moment_coefficient(k).unwrap() - exact).abs() < 1e-16);
        }
        let w = Weight::power(0.7).unwrap();
        assert!((w.moment_coefficient(0).unwrap() - 1.0 / 1.7).abs() < 1e-15);
        // large-k branch agrees with the product
        let a = beta_moment(0.7, 20_000);
        let b = {
            use crate::special::ln_gamma;
            (ln_gamma(20_001.0) + ln_gamma(1.7) - ln_gamma(20_002.7)).exp()
        };
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn generic_moments_match_closed_forms() {
        // the generic quadrature path, exercised on families with closed forms
        let t: Vec<f64> = vec![0.0, 0.3, 1.0];
        let g: Vec<f64> = vec![0.0, 0.3, 0.3];
        let table = Weight::tabulated(t, g).unwrap();
        for k in [0usize, 1, 5, 40, 1000, 30_000] {
            let exact = min_delta_moment(0.3, k);
            let got = table.moment_coefficient(k).unwrap();
            assert!((got - exact).abs() < 1e-10 * exact, "k = {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn min_delta_moment_matches_direct_sum() {
        // k = 0: δ - δ²/2
        let d = 0.3;
        assert!((min_delta_moment(d, 0) - (d - 0.5 * d * d)).abs() < 1e-16);
        // k = 1: ∫(1-u) min(δ,u) = δ²/2 - δ³/3 + δ(1-δ)²/2
        let exact = d * d / 2.0 - d * d * d / 3.0 + d * (1.0 - d) * (1.0 - d) / 2.0;
        assert!((min_delta_moment(d, 1) - exact).abs() < 1e-16);
    }

    #[test]
    fn kernel_integrals_match_quadrature() {
        let weights = [
            Weight::power(0.5).unwrap(),
            Weight::log_power(2.0).unwrap(),
            Weight::exp_power(1.0).unwrap(),
            Weight::min_delta(0.3).unwrap(),
        ];
        for w in &weights {
            for b in [0.01, 0.3, 1.0] {
                let closed = w.kernel_integral(b).unwrap();
                // ∫₀^b g(s)/s ds = ∫_{-ln b}^∞ g(e^{-y}) dy
                let y0 = -f64::ln(b);
                let mut pts = vec![y0];
                let mut y = y0 + 0.125;
                while y < Y_MAX {
                    pts.push(y);
                    y = y0 + 2.0 * (y - y0);
                }
                pts.push(Y_MAX);
                let ladder = Ladder(pts).with_points(w.kinks().into_iter().map(|k| -k.ln()));
                let quad = gauss_kronrod_segments(|y| w.g((-y).exp()), ladder.points(), Tolerance::new(1e-15, 1e-12))
                    .unwrap()
                    .value
                    + w.kernel_integral((-Y_MAX).exp()).unwrap();
                assert!((closed - quad).abs() < 1e-9 * closed, "{w} b={b}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn tabulated_kernel_integral_diverges_when_g0_positive() {
        let w = Weight::tabulated(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(!w.kernel_integrable);
        assert!(matches!(w.phi(0.0), Err(Error::Divergence(_))));
        assert!(w.phi(1.0).is_ok());
    }

    #[test]
    fn alpha_one_closed_forms() {
        let w = Weight::power(1.0).unwrap();
        assert_eq!(w.phi(0.0).unwrap(), 1.0);
        assert!((phi_alpha_one(PI) - (1.0 - 2.0 * LN_2)).abs() < 1e-15);
        assert!((phi_second_alpha_one(PI) - (LN_2 - 0.5)).abs() < 1e-15);
        for i in 1..200 {
            let t = i as f64 * TAU / 200.0;
            let closed = phi_alpha_one(t);
            let integral = w.phi_integral(t).unwrap();
            assert!((closed - integral).abs() < 1e-12, "t = {t}");
            if t < PI {
                let d = w.phi_derivative_integral(t).unwrap();
                assert!((d - phi_prime_alpha_one(t)).abs() < 1e-11, "t = {t}");
            }
            let dd = w.phi_second_derivative(t).unwrap();
            assert!((dd - phi_second_alpha_one(t)).abs() < 1e-9, "t = {t}: {dd}");
        }
    }

    #[test]
    fn phi_is_even_and_periodic() {
        let w = Weight::power(0.5).unwrap();
        for t in [0.3, 1.1, 2.9, 4.0] {
            let v = w.phi(t).unwrap();
            assert_eq!(v, w.phi(-t).unwrap());
            assert!((v - w.phi(TAU - t).unwrap()).abs() < 1e-13);
            assert!((v - w.phi(t + TAU).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn phi_near_zero_approaches_kernel_integral() {
        // φ(0) - φ(t) is of the order of ∫₀^t g(s)/s ds, which for log
        // weights decays only like 1/log(1/t)
        for w in [Weight::power(0.5).unwrap(), Weight::log_power(2.0).unwrap()] {
            let at0 = w.phi(0.0).unwrap();
            let mut last = f64::INFINITY;
            for t in [1e-3, 1e-5, 1e-7, 1e-9] {
                let gap = at0 - w.phi(t).unwrap();
                assert!(gap > 0.0 && gap < last, "{w}: t = {t}, gap = {gap}");
                assert!(gap < 2.0 * w.kernel_integral(4.0 * t).unwrap(), "{w}: t = {t}");
                last = gap;
            }
        }
    }

    #[test]
    fn dyadic_shell_test_separates_log_powers() {
        let q1 = |t: f64| if t == 0.0 { 0.0 } else { (2.0 / t).ln().recip() };
        let q2 = |t: f64| if t == 0.0 { 0.0 } else { (2.0 / t).ln().powi(-2) };
        assert!(!dyadic_shells_summable(q1));
        assert!(dyadic_shells_summable(q2));
        assert!(dyadic_shells_summable(|t: f64| t));
    }

    #[test]
    fn power_tail_is_telescoped_sum() {
        let w = Weight::power(1.0).unwrap();
        let m = MomentCoefficients::new(&w, 99).unwrap();
        // Σ_{k≥100} 1/((k+1)(k+2)) = 1/101
        assert!((m.tail_bound - 1.0 / 101.0).abs() < 1e-15);
        let generic = w.moment_tail(99).unwrap();
        assert!((generic - 1.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn second_derivative_small_t_matches_difference_quotient() {
        for alpha in [0.25, 0.5] {
            let g = Weight::power(alpha).unwrap();
            for t in [6e-4, 2e-3, 0.02] {
                let h = 1e-3 * t;
                let fd = (g.phi_derivative(t + h).unwrap() - g.phi_derivative(t - h).unwrap()) / (2.0 * h);
                let v = g.phi_second_derivative(t).unwrap();
                assert!((v - fd).abs() < 1e-5 * v.abs(), "α={alpha} t={t}: {v} vs {fd}");
            }
        }
    }

    #[test]
    fn convexity_flags() {
        assert!(Weight::power(1.0).unwrap().is_concave_nondecreasing);
        assert!(!Weight::power(2.0).unwrap().is_concave_nondecreasing);
        assert!(Weight::min_delta(0.3).unwrap().is_concave_nondecreasing);
        let concave = Weight::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 0.8, 1.0]).unwrap();
        assert!(concave.is_concave_nondecreasing);
        let convex = Weight::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 0.2, 1.0]).unwrap();
        assert!(!convex.is_concave_nondecreasing);
    }

    #[test]
    fn accelerated_series_matches_integral() {
        let cases = [
            (Weight::power(1.0).unwrap(), 2000),
            (Weight::power(0.5).unwrap(), 2000),
            (Weight::log_power(2.0).unwrap(), 400),
            (Weight::min_delta(0.3).unwrap(), 2000),
        ];
        for (w, k) in &cases {
            let m = MomentCoefficients::new(w, *k).unwrap();
            for i in 0..40 {
                let t = 0.1 + i as f64 * (TAU - 0.2) / 39.0;
                let (series, est) = m.phi_series(t);
                let integral = w.phi_integral(t).unwrap();
                assert!(
                    (series - integral).abs() < 1e-9,
                    "{w} t={t}: {series} vs {integral} (est {est})"
                );
            }
        }
    }
}
