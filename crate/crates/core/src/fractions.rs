//! Pole configurations on the unit circle and the simplest fractions
//! `h(z) = Σ_k 1/(z - e^{iϑ_k})` they define.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluations closer than this to a pole are refused.
pub const POLE_CLEARANCE: f64 = 1e-14;

/// Wrap an angle difference to `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PoleConfiguration {
    angles: Vec<f64>,
}

impl PoleConfiguration {
    /// Angles are reduced into `[0, 2π)`; at least one pole is required.
    pub fn new(angles: Vec<f64>) -> Result<PoleConfiguration> {
        if angles.is_empty() {
            return Err(Error::Domain("a pole configuration needs N ≥ 1 poles".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("pole angles must be finite".into()));
        }
        Ok(PoleConfiguration {
            angles: angles.into_iter().map(reduce).collect(),
        })
    }

    /// `ϑ_k = 2πk/N`.
    pub fn equispaced(n: usize) -> PoleConfiguration {
        assert!(n >= 1);
        PoleConfiguration {
            angles: (0..n).map(|k| TAU * k as f64 / n as f64).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PoleConfiguration {
        assert!(n >= 1);
        PoleConfiguration {
            angles: (0..n).map(|_| rng.gen_range(0.0..TAU)).collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<PoleConfiguration> {
        let angles: Vec<f64> = serde_json::from_str(s)?;
        PoleConfiguration::new(angles)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<PoleConfiguration> {
        PoleConfiguration::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.angles).expect("angles serialize")
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect()
    }

    pub fn rotate(&self, theta: f64) -> PoleConfiguration {
        PoleConfiguration {
            angles: self.angles.iter().map(|a| reduce(a + theta)).collect(),
        }
    }

    pub fn conjugate(&self) -> PoleConfiguration {
        PoleConfiguration {
            angles: self.angles.iter().map(|a| reduce(-a)).collect(),
        }
    }

    /// Sorted, then rotated so that the smallest rotation (lexicographic in
    /// the gap sequence) has `ϑ_0 = 0`.
    pub fn canonical(&self) -> PoleConfiguration {
        let mut sorted = self.angles.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let gaps: Vec<f64> = (0..n)
            .map(|i| {
                let next = if i + 1 < n { sorted[i + 1] } else { sorted[0] + TAU };
                next - sorted[i]
            })
            .collect();
        let start = (0..n)
            .min_by(|&i, &j| {
                for m in 0..n {
                    let (a, b) = (gaps[(i + m) % n], gaps[(j + m) % n]);
                    if (a - b).abs() > 1e-12 {
                        return a.total_cmp(&b);
                    }
                }
                std::cmp::Ordering::Equal
            })
            .unwrap_or(0);
        let base = sorted[start];
        let mut angles: Vec<f64> = (0..n).map(|m| reduce(sorted[(start + m) % n] - base)).collect();
        angles[0] = 0.0;
        PoleConfiguration { angles }
    }

    /// Distance modulo rotation and relabelling: the minimum over cyclic
    /// matchings of sorted angles and over rotations of the largest angular
    /// deviation.
    pub fn gauge_distance(&self, other: &PoleConfiguration) -> f64 {
        assert_eq!(self.len(), other.len(), "configurations differ in size");
        let mut a = self.angles.clone();
        let mut b = other.angles.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let n = a.len();
        let mut best = f64::INFINITY;
        for shift in 0..n {
            let d0 = wrap_pi(b[shift] - a[0]);
            let (mut lo, mut hi) = (d0, d0);
            for k in 1..n {
                let d = wrap_pi(b[(k + shift) % n] - a[k]);
                let unwrapped = d0 + wrap_pi(d - d0);
                lo = lo.min(unwrapped);
                hi = hi.max(unwrapped);
            }
            best = best.min(0.5 * (hi - lo));
        }
        best
    }

    pub fn gauge_distance_to_equispaced(&self) -> f64 {
        self.gauge_distance(&PoleConfiguration::equispaced(self.len()))
    }

    /// Smallest angular separation between two poles (0 for coincident poles).
    pub fn min_separation(&self) -> f64 {
        if self.len() < 2 {
            return TAU;
        }
        let mut s = self.angles.clone();
        s.sort_by(f64::total_cmp);
        let wrap = s[0] + TAU - s[s.len() - 1];
        s.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min)
    }
}

fn reduce(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplestFraction {
    pub poles: PoleConfiguration,
    #[serde(skip)]
    points: Vec<Complex64>,
}

impl SimplestFraction {
    pub fn new(poles: PoleConfiguration) -> SimplestFraction {
        let points = poles.poles();
        SimplestFraction { poles, points }
    }

    pub fn psi(n: usize) -> SimplestFraction {
        SimplestFraction::new(PoleConfiguration::equispaced(n))
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// `Σ_k 1/(z - a_k)`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for &a in &self.points {
            let d = z - a;
            let dist = d.norm();
            if dist < POLE_CLEARANCE {
                return Err(Error::PoleEvaluation { distance: dist });
            }
            sum += d.inv();
        }
        Ok(sum)
    }

    /// `a_s = -Σ_k e^{-i(s+1)ϑ_k}`, `s = 0..=m`.
    pub fn taylor_coefficients(&self, m: usize) -> Vec<Complex64> {
        taylor_coefficients_of(self.poles.angles(), m)
    }
}

/// Taylor coefficients of `Σ_k 1/(z - e^{iϑ_k})` at 0, `s = 0..=m`.
///
/// Powers are advanced by multiplication and re-seeded from `sin_cos`
/// every 64 steps.
pub fn taylor_coefficients_of(angles: &[f64], m: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m + 1];
    for &theta in angles {
        let step = Complex64::from_polar(1.0, -theta);
        let mut w = step;
        for (s, slot) in out.iter_mut().enumerate() {
            if s % 64 == 0 {
                w = Complex64::from_polar(1.0, -((s + 1) as f64) * theta);
            }
            *slot -= w;
            w *= step;
        }
    }
    out
}

/// `Ψ_N(z) = N z^{N-1}/(z^N - 1)`, the fraction with poles at the N-th roots of unity.
pub fn psi(n: usize, z: Complex64) -> Result<Complex64> {
    assert!(n >= 1);
    let nf = n as f64;
    // nearest root of unity
    let k = (z.arg() * nf / TAU).round();
    let root = Complex64::from_polar(1.0, TAU * k / nf);
    let dist = (z - root).norm();
    if dist < POLE_CLEARANCE {
        return Err(Error::PoleEvaluation { distance: dist });
    }
    let zn1 = z.powu(n as u32 - 1);
    Ok(nf * zn1 / (zn1 * z - 1.0))
}
