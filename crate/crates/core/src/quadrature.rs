//! Numerical integration on finite intervals.
//!
//! Two rules are provided:
//!
//! - [`gauss_kronrod`]: globally adaptive G7/K15 bisection. Used for smooth
//!   integrands and for integrands with mild endpoint behaviour.
//! - [`tanh_sinh`]: double-exponential rule that clusters nodes at both
//!   endpoints. Used where the integrand has an integrable power singularity
//!   at the left endpoint (`g'(u) ~ u^{α-1}`, Bose integrands).
//!
//! [`Ladder`] builds geometric breakpoint sets; most integrals in this crate
//! have structure on several scales that collapse toward `u = 0`.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };

    pub fn scaled(self, factor: f64) -> QuadResult {
        QuadResult {
            value: self.value * factor,
            error: self.error * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;

    fn add(self, rhs: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

impl std::iter::Sum for QuadResult {
    fn sum<I: Iterator<Item = QuadResult>>(iter: I) -> QuadResult {
        iter.fold(QuadResult::ZERO, |acc, r| acc + r)
    }
}

/// Stopping rule: `error <= max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            max_intervals: 2000,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-14, 1e-12)
    }
}

/// One G7/K15 panel on `[a, b]`: `(kronrod, error estimate)`.
///
/// The error estimate uses the QUADPACK rescaling of `|K15 - G7|`.
pub fn gk15_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (v, e, _) = gk15_full(f, a, b);
    (v, e)
}

/// As [`gk15_panel`], also returning `∫|f|` on the panel.
fn gk15_full<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err, res_abs)
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    adaptive(&f, &[a, b], tol)
}

/// Integrate over `[p_0, p_last]` with the given breakpoints as the initial
/// partition. Refinement is global: the tolerance applies to the total.
pub fn gauss_kronrod_segments<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    if points.len() < 2 {
        return Ok(QuadResult::ZERO);
    }
    adaptive(&f, points, tol)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: Tolerance) -> Result<QuadResult> {
    // (a, b, value, error, splittable, ∫|f|)
    let mut panels: Vec<(f64, f64, f64, f64, bool, f64)> = Vec::with_capacity(2 * points.len() + 64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let (v, e, r) = gk15_full(f, w[0], w[1]);
            panels.push((w[0], w[1], v, e, true, r));
        }
    }
    let mut evaluations = 15 * panels.len();
    let max_panels = tol.max_intervals.max(2 * panels.len());
    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature {
                achieved: f64::INFINITY,
                requested: tol.target(0.0),
            });
        }
        // cancellation can put the target below the rounding floor
        let floor = 200.0 * f64::EPSILON * panels.iter().map(|p| p.5).sum::<f64>();
        if error <= tol.target(value).max(floor) {
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.4)
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            // Every panel is at the resolution floor; report what was achieved.
            return Ok(QuadResult {
                value,
                error,
                evaluations,
            });
        };
        if panels.len() >= max_panels {
            return Err(Error::Quadrature {
                achieved: error,
                requested: tol.target(value),
            });
        }
        let (pa, pb, _, _, _, _) = panels[i];
        let mid = 0.5 * (pa + pb);
        let width_floor = 64.0 * f64::EPSILON * pa.abs().max(pb.abs()) + f64::MIN_POSITIVE;
        if (pb - pa).abs() <= width_floor || mid <= pa || mid >= pb {
            panels[i].4 = false;
            continue;
        }
        let (v1, e1, r1) = gk15_full(f, pa, mid);
        let (v2, e2, r2) = gk15_full(f, mid, pb);
        evaluations += 30;
        panels[i] = (pa, mid, v1, e1, true, r1);
        panels.push((mid, pb, v2, e2, true, r2));
    }
}

const TANH_SINH_T_MAX: f64 = 6.5;

/// Tanh–sinh integration over `[a, b]`.
///
/// `f` receives `(x, x - a)`; the second argument is exact near `a` even
/// when `x` itself has lost the digits, so left-endpoint singularities such
/// as `u^{-3/4}` can be evaluated accurately.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult::ZERO);
    }
    let width = b - a;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut evaluations = 0usize;
    // Contribution of the node at parameter t (weight already applied).
    let node = |t: f64, evals: &mut usize| -> f64 {
        let y = half_pi * t.sinh();
        let e = (-2.0 * y.abs()).exp();
        // distance to the nearer endpoint
        let dist = width * e / (1.0 + e);
        if dist <= 0.0 || dist < f64::MIN_POSITIVE * 1e10 {
            return 0.0;
        }
        let weight = half_pi * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e)) * 0.5 * width;
        let (x, from_a) = if t < 0.0 {
            (a + dist, dist)
        } else if t > 0.0 {
            (b - dist, width - dist)
        } else {
            (a + 0.5 * width, 0.5 * width)
        };
        *evals += 1;
        let v = f(x, from_a);
        if v.is_finite() {
            weight * v
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    let mut sum = node(0.0, &mut evaluations);
    let mut k = 1;
    while (k as f64) * h <= TANH_SINH_T_MAX {
        let t = k as f64 * h;
        sum += node(t, &mut evaluations) + node(-t, &mut evaluations);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut error = f64::INFINITY;
    for level in 1..=10 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= TANH_SINH_T_MAX {
            let t = k as f64 * h;
            sum += node(t, &mut evaluations) + node(-t, &mut evaluations);
            k += 2;
        }
        let next = sum * h;
        error = (next - estimate).abs();
        estimate = next;
        if error <= tol.target(estimate) && level >= 3 {
            return Ok(QuadResult {
                value: estimate,
                error,
                evaluations,
            });
        }
    }
    Err(Error::Quadrature {
        achieved: error,
        requested: tol.target(estimate),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Nodes and weights of the K15 rule mapped to `[a, b]`, with the G7
/// weights on the same nodes (zero where the node is Kronrod-only).
pub fn kronrod_nodes(a: f64, b: f64) -> Vec<(f64, f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(15);
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out.push((center - half * XGK[j], half * WGK[j], half * wg));
        out.push((center + half * XGK[j], half * WGK[j], half * wg));
    }
    out.push((center, half * WGK[7], half * WG[3]));
    out
}

/// Geometric breakpoints `lo, lo·r, lo·r², ...` strictly below `hi`, then `hi`.
#[derive(Clone, Debug)]
pub struct Ladder(pub Vec<f64>);

impl Ladder {
    pub fn geometric(lo: f64, hi: f64, ratio: f64) -> Ladder {
        debug_assert!(ratio > 1.0 && lo > 0.0);
        let mut pts = Vec::new();
        let mut p = lo;
        while p < hi * (1.0 - 1e-12) {
            pts.push(p);
            p *= ratio;
        }
        pts.push(hi);
        Ladder(pts)
    }

    /// Merge extra breakpoints lying strictly inside `(first, last)`.
    pub fn with_points(mut self, extra: impl IntoIterator<Item = f64>) -> Ladder {
        let (lo, hi) = (self.0[0], *self.0.last().unwrap());
        self.0.extend(extra.into_iter().filter(|&p| p > lo && p < hi));
        self.0.sort_by(f64::total_cmp);
        self.0.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * y.abs());
        self
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_exactly() {
        let r = gauss_kronrod(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn gk_adapts_to_sharp_peak() {
        let eps = 1e-6;
        let r = gauss_kronrod(|x| eps / (x * x + eps * eps), 0.0, 1.0, Tolerance::new(0.0, 1e-12)).unwrap();
        let exact = (1.0 / eps).atan();
        assert!((r.value - exact).abs() < 1e-11, "{} vs {}", r.value, exact);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_power_singularity() {
        let r = tanh_sinh(|_, u| 0.25 * u.powf(-0.75), 0.0, 1.0, Tolerance::new(0.0, 1e-13)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
        let r = tanh_sinh(|x, _| (x * x + 1.0).ln(), -1.0, 3.0, Tolerance::new(0.0, 1e-13)).unwrap();
        let anti = |x: f64| x * (x * x + 1.0).ln() - 2.0 * x + 2.0 * x.atan();
        assert!((r.value - (anti(3.0) - anti(-1.0))).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
            if n >= 3 {
                assert!((m4 - 0.4).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ladder_is_increasing_and_ends_at_hi() {
        let l = Ladder::geometric(1e-6, 1.0, 4.0).with_points([0.3, 2.0, 1e-7]);
        let p = l.points();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*p.last().unwrap(), 1.0);
        assert!(p.contains(&0.3));
    }
}
