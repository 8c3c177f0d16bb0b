//! Growth of `‖Ψ_N‖_(g)`: the limit `Γ(α+2)ζ(α+1)` of `N^{α-1}‖Ψ_N‖²_α`,
//! the two-integral bracket, and the four rate regimes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::psi_norm_sq;
use crate::quadrature::{gauss_kronrod_segments, tanh_sinh, Ladder, Tolerance};
use crate::special::{gamma, zeta};
use crate::weights::{Family, Weight};

/// Largest `max/min` accepted when a normalised sequence is claimed to be bounded above and below.
pub const BAND_LIMIT: f64 = 3.0;

/// `Γ(α+2) ζ(α+1)`.
pub fn limit_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("α = {alpha} must be positive")));
    }
    Ok(gamma(alpha + 2.0) * zeta(alpha + 1.0))
}

/// `(α+1) ∫₀^∞ s^α/(e^s - 1) ds` by quadrature.
pub fn bose_integral(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("α = {alpha} must be positive")));
    }
    let f = |s: f64| s.powf(alpha) / s.exp_m1();
    let head = tanh_sinh(|s, _| f(s), 0.0, 1.0, Tolerance::new(0.0, 1e-13))?;
    // the integrand is below e^{-740} past s = 800
    let ladder = Ladder::geometric(1.0, 800.0, 2.0);
    let body = gauss_kronrod_segments(f, ladder.points(), Tolerance::new(0.0, 1e-13))?;
    Ok((alpha + 1.0) * (head.value + body.value))
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    pub reference: Vec<f64>,
    pub ratios: Vec<f64>,
    pub monotone_increasing: bool,
    pub monotone_decreasing: bool,
    /// `max/min` of `values`.
    pub band: f64,
    pub passed: bool,
    pub description: String,
}

impl RateReport {
    fn new(ns: &[usize], values: Vec<f64>, reference: Vec<f64>, description: String) -> RateReport {
        let ratios = values.iter().zip(&reference).map(|(v, r)| v / r).collect();
        let monotone_increasing = values.windows(2).all(|w| w[1] > w[0]);
        let monotone_decreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        let band = band(&values);
        RateReport {
            ns: ns.to_vec(),
            values,
            reference,
            ratios,
            monotone_increasing,
            monotone_decreasing,
            band,
            passed: false,
            description,
        }
    }
}

fn band(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::Domain("empty N sequence".into()));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "N sequence must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

fn psi_sweep(ns: &[usize], g: &Weight) -> Result<Vec<f64>> {
    ns.par_iter().map(|&n| Ok(psi_norm_sq(n, g)?.value_sq)).collect()
}

/// `N^{α-1} ‖Ψ_N‖²_α` against `Γ(α+2)ζ(α+1)`; passes when strictly increasing
/// and below the limit.
pub fn scaled_norm_sequence(alpha: f64, ns: &[usize]) -> Result<RateReport> {
    check_ns(ns)?;
    let g = Weight::power(alpha)?;
    let limit = limit_constant(alpha)?;
    let norms = psi_sweep(ns, &g)?;
    let values = ns
        .iter()
        .zip(norms)
        .map(|(&n, v)| (n as f64).powf(alpha - 1.0) * v)
        .collect();
    let mut r = RateReport::new(
        ns,
        values,
        vec![limit; ns.len()],
        format!("N^(α-1)‖Ψ_N‖² for α = {alpha}, reference Γ(α+2)ζ(α+1)"),
    );
    r.passed = r.monotone_increasing && r.ratios.iter().all(|&x| x < 1.0);
    Ok(r)
}

/// The two integrals `N ∫₀^{1/N} g(t)/t dt` and `N² ∫_{1/N}^1 (1-t)^N g(t) dt`
/// (both times `κ`) compared with `‖Ψ_N‖²_(g)`.
#[derive(Clone, Debug, Serialize)]
pub struct PropositionBounds {
    pub n: usize,
    pub small_t: f64,
    pub large_t: f64,
    pub bracket: f64,
    pub norm_sq: f64,
    /// `norm_sq / bracket`.
    pub ratio: f64,
}

pub fn proposition_bounds(g: &Weight, n: usize) -> Result<PropositionBounds> {
    if n == 0 {
        return Err(Error::Domain("N ≥ 1 is needed".into()));
    }
    let nf = n as f64;
    let h = 1.0 / nf;
    let small_t = g.kappa * nf * g.kernel_integral(h)?;
    let large_t = g.kappa * integral_large(g, n, h)?;
    let norm_sq = psi_norm_sq(n, g)?.value_sq;
    let bracket = small_t + large_t;
    Ok(PropositionBounds {
        n,
        small_t,
        large_t,
        bracket,
        norm_sq,
        ratio: norm_sq / bracket,
    })
}

fn integral_large(g: &Weight, n: usize, from: f64) -> Result<f64> {
    if from >= 1.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ladder = Ladder::geometric(from, 1.0, 2.0).with_points(g.kinks());
    let r = gauss_kronrod_segments(
        |t| nf * nf * (nf * (-t).ln_1p()).exp() * g.g(t),
        ladder.points(),
        Tolerance::new(0.0, 1e-12),
    )?;
    Ok(r.value)
}

/// Ratios `‖Ψ_N‖² / bracket` over `ns`; passes when their band is below [`BAND_LIMIT`].
pub fn proposition_sweep(g: &Weight, ns: &[usize]) -> Result<RateReport> {
    check_ns(ns)?;
    let rows: Vec<PropositionBounds> = ns
        .par_iter()
        .map(|&n| proposition_bounds(g, n))
        .collect::<Result<_>>()?;
    let mut r = RateReport::new(
        ns,
        rows.iter().map(|b| b.norm_sq).collect(),
        rows.iter().map(|b| b.bracket).collect(),
        format!("‖Ψ_N‖² against the two-integral bracket for {g}"),
    );
    r.band = band(&r.ratios);
    r.passed = r.band < BAND_LIMIT;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorollaryCase {
    /// `exp(-cN) ≲ ‖Ψ_N‖ = o(N^{1/2})`, any admissible weight.
    A,
    /// `‖Ψ_N‖ = o(1)` when `g(t) = o(t)`.
    B,
    /// `‖Ψ_N‖² ≍ N/log^{q-1}N` for `g = log^{-q}(2/t)`.
    C,
    /// `log(1/‖Ψ_N‖) ≍ N^{q/(q+1)}` for `g = exp(-t^{-q})`.
    D,
}

impl FromStr for CorollaryCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(CorollaryCase::A),
            "B" => Ok(CorollaryCase::B),
            "C" => Ok(CorollaryCase::C),
            "D" => Ok(CorollaryCase::D),
            _ => Err(Error::Usage(format!("unknown case `{s}` (expected A, B, C or D)"))),
        }
    }
}

impl fmt::Display for CorollaryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The normalised sequence for each regime:
///
/// - A: `‖Ψ_N‖/√N`, passes when non-increasing; the reference holds `-log‖Ψ_N‖/N`,
/// - B: `‖Ψ_N‖²`, passes when non-increasing,
/// - C: `‖Ψ_N‖² log^{q-1}N / N`, passes when its band is below [`BAND_LIMIT`],
/// - D: `log(1/‖Ψ_N‖) / N^{q/(q+1)}`, passes on the band and on `log‖Ψ_N‖` negative and decreasing.
pub fn corollary_rates(case: CorollaryCase, g: &Weight, ns: &[usize]) -> Result<RateReport> {
    check_ns(ns)?;
    match (case, &g.family) {
        (CorollaryCase::A, _) if !g.kernel_integrable => {
            return Err(Error::Usage("case A needs ∫₀ g(t)/t dt < ∞".into()))
        }
        (CorollaryCase::B, _) if !g.is_little_o_of_t() => {
            return Err(Error::Usage(format!("case B needs g(t) = o(t); {g} is not")))
        }
        (CorollaryCase::C, Family::LogPower { .. }) | (CorollaryCase::D, Family::ExpPower { .. }) => {}
        (CorollaryCase::C, _) => return Err(Error::Usage("case C needs a logpow:q weight".into())),
        (CorollaryCase::D, _) => return Err(Error::Usage("case D needs an exppow:q weight".into())),
        _ => {}
    }
    let sq = psi_sweep(ns, g)?;
    let nf = |n: usize| n as f64;
    let mut r = match (case, &g.family) {
        (CorollaryCase::A, _) => {
            let values = ns.iter().zip(&sq).map(|(&n, v)| v.sqrt() / nf(n).sqrt()).collect();
            let decay = ns.iter().zip(&sq).map(|(&n, v)| -0.5 * v.ln() / nf(n)).collect();
            let mut r = RateReport::new(ns, values, decay, format!("‖Ψ_N‖/√N for {g}"));
            r.passed = r.monotone_decreasing && r.values.iter().all(|&v| v > 0.0);
            r
        }
        (CorollaryCase::B, _) => {
            let mut r = RateReport::new(ns, sq.clone(), vec![1.0; ns.len()], format!("‖Ψ_N‖² for {g}"));
            r.passed = r.monotone_decreasing;
            r
        }
        (CorollaryCase::C, Family::LogPower { q }) => {
            let values = ns
                .iter()
                .zip(&sq)
                .map(|(&n, v)| v * nf(n).ln().powf(q - 1.0) / nf(n))
                .collect();
            let mut r = RateReport::new(
                ns,
                values,
                vec![1.0; ns.len()],
                format!("‖Ψ_N‖² log^(q-1)N / N for {g}"),
            );
            r.passed = r.band < BAND_LIMIT;
            r
        }
        (CorollaryCase::D, Family::ExpPower { q }) => {
            let logs: Vec<f64> = sq.iter().map(|v| 0.5 * v.ln()).collect();
            let values = ns
                .iter()
                .zip(&logs)
                .map(|(&n, l)| -l / nf(n).powf(q / (q + 1.0)))
                .collect();
            let mut r = RateReport::new(ns, values, logs.clone(), format!("log(1/‖Ψ_N‖) / N^(q/(q+1)) for {g}"));
            let logs_ok = logs.iter().all(|&l| l < 0.0) && logs.windows(2).all(|w| w[1] < w[0]);
            r.passed = r.band < BAND_LIMIT && logs_ok;
            r
        }
        _ => unreachable!("checked above"),
    };
    r.ratios = r.values.iter().zip(&r.reference).map(|(v, x)| v / x).collect();
    Ok(r)
}

/// `N` sweeps: `a,b,c`, `a:b` (every integer), `a:b:step`, `a:b:geom` (doubling)
/// or `a:b:log` (about ten per decade).
pub fn parse_ns(spec: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad N sweep `{spec}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let spec = spec.trim();
    let mut out: Vec<usize> = if spec.contains(',') || !spec.contains(':') {
        spec.split(',').map(num).collect::<Result<_>>()?
    } else {
        let parts: Vec<&str> = spec.split(':').collect();
        let (a, b) = (num(parts[0])?, num(parts.get(1).ok_or_else(bad)?)?);
        if a == 0 || b < a {
            return Err(bad());
        }
        match parts.get(2).map(|s| s.trim()) {
            None => (a..=b).collect(),
            Some("geom") => std::iter::successors(Some(a), |&n| Some(2 * n))
                .take_while(|&n| n <= b)
                .collect(),
            Some("log") => {
                let steps = ((b as f64 / a as f64).log10() * 10.0).ceil().max(1.0) as usize;
                let mut v: Vec<usize> = (0..=steps)
                    .map(|i| (a as f64 * (b as f64 / a as f64).powf(i as f64 / steps as f64)).round() as usize)
                    .collect();
                v.dedup();
                v
            }
            Some(step) => {
                let step = num(step)?;
                if step == 0 {
                    return Err(bad());
                }
                (a..=b).step_by(step).collect()
            }
        }
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn limit_constants() {
        assert!((limit_constant(1.0).unwrap() - PI * PI / 3.0).abs() < 1e-13);
        assert!((limit_constant(2.0).unwrap() - 7.212_341_418_957_565).abs() < 1e-12);
        assert!(limit_constant(0.0).is_err());
    }

    #[test]
    fn bose_integral_matches_gamma_zeta() {
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let a = limit_constant(alpha).unwrap();
            let b = bose_integral(alpha).unwrap();
            assert!((a - b).abs() < 1e-9, "α = {alpha}: {a} vs {b}");
        }
        assert!((bose_integral(1.0).unwrap() - 2.0 * PI * PI / 6.0).abs() < 1e-10);
    }

    #[test]
    fn scaled_sequence_alpha_one() {
        let ns: Vec<usize> = (1..=100).collect();
        let r = scaled_norm_sequence(1.0, &ns).unwrap();
        assert!(r.monotone_increasing);
        assert!((r.values[0] - 2.0).abs() < 1e-10);
        assert!((r.ratios[0] - 2.0 / (PI * PI / 3.0)).abs() < 1e-10);
        assert!(*r.ratios.last().unwrap() > 0.95);
        assert!(r.passed);
    }

    #[test]
    fn scaled_sequence_half() {
        let r = scaled_norm_sequence(0.5, &[10, 100, 1000]).unwrap();
        assert!(r.monotone_increasing);
        assert!(r.values.iter().all(|&v| v < limit_constant(0.5).unwrap()));
    }

    #[test]
    fn bracket_small_n() {
        let g = Weight::power(1.0).unwrap();
        let b = proposition_bounds(&g, 1).unwrap();
        assert!(b.small_t > 0.0 && b.bracket.is_finite());
        // κ ∫₀¹ g/t = 2 for α = 1
        assert!((b.small_t - 2.0).abs() < 1e-12);
        assert!((b.norm_sq - 2.0).abs() < 1e-10);
        let b10 = proposition_bounds(&g, 10).unwrap();
        assert!(b10.ratio > 0.0 && b10.ratio.is_finite());
    }

    #[test]
    fn case_checks() {
        let g = Weight::power(1.0).unwrap();
        assert!(matches!(
            corollary_rates(CorollaryCase::C, &g, &[10, 20]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            corollary_rates(CorollaryCase::B, &g, &[10, 20]),
            Err(Error::Usage(_))
        ));
        assert!(corollary_rates(CorollaryCase::A, &g, &[10, 20, 40]).unwrap().passed);
        assert!("c".parse::<CorollaryCase>().unwrap() == CorollaryCase::C);
        assert!("E".parse::<CorollaryCase>().is_err());
    }

    #[test]
    fn sweeps_parse() {
        assert_eq!(parse_ns("32:512:geom").unwrap(), vec![32, 64, 128, 256, 512]);
        assert_eq!(parse_ns("1:4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_ns("5,2,9").unwrap(), vec![2, 5, 9]);
        assert_eq!(parse_ns("10:30:10").unwrap(), vec![10, 20, 30]);
        let log = parse_ns("100:10000:log").unwrap();
        assert_eq!((log[0], *log.last().unwrap(), log.len()), (100, 10000, 21));
        assert!(parse_ns("0:4").is_err());
        assert!(parse_ns("x").is_err());
    }
}
