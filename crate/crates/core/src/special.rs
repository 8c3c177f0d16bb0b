//! Gamma, Riemann zeta and the exponential integral `E₁`.

use std::f64::consts::PI;

// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `Γ(x)` for real `x` away from the non-positive integers.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x <= 20.0 && x.fract() == 0.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    if x < 140.0 {
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * series
    } else {
        ln_gamma(x).exp()
    }
}

// B_2, B_4, ..., B_24
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Riemann zeta `ζ(s)` for real `s > 1`, by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta is implemented for s > 1");
    const N: usize = 12;
    let n = N as f64;
    let mut sum: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * n.powf(-s);
    // s (s+1) ... (s+2j-2) / (2j)! * n^{-s-2j+1}
    let mut rising = s;
    let mut factorial = 2.0;
    let mut npow = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / factorial * rising * npow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let m = 2.0 * (j as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m);
        factorial *= (m + 1.0) * (m + 2.0);
        npow /= n * n;
    }
    sum
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}
