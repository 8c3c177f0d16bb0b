//! Reference values frozen from independent series, evaluated in 30-digit arithmetic.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use chui_lab_core::asymptotics::limit_constant;
use chui_lab_core::moments::annulus_energy;
use chui_lab_core::norms::{norm_sq_gram, norm_sq_quadrature, psi_norm_sq};
use chui_lab_core::thompson::rho;
use chui_lab_core::{PoleConfiguration, Weight};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

// α = 1: ‖Ψ_N‖² = 2N Σ_k 1/(k(kN+1)) = 2N(ψ(1 + 1/N) + γ)
const ALPHA_ONE: [(usize, f64); 4] = [
    (3, 2.671_091_309_284_359_2),
    (10, 3.069_214_489_809_121_3),
    (100, 3.266_041_406_571_672_6),
    (1000, 3.287_466_182_464_778_3),
];

// α = 2: Σ_k 6N²/((kN)(kN+1)(kN+2))
const ALPHA_TWO: [(usize, f64); 3] = [
    (3, 1.182_442_685_818_578_2),
    (10, 0.562_370_420_147_026_97),
    (100, 0.070_217_886_109_096_322),
];

// α = 1/2: Σ_k (3/2) N² B(kN, 3/2), terms ~ k^{-3/2}, summed with an Euler–Maclaurin tail
const ALPHA_HALF: [(usize, f64); 2] = [(4, 6.643_663_046_095_201_3), (16, 13.728_195_161_760_440)];

#[test]
fn psi_norms_alpha_one() {
    let g = Weight::power(1.0).unwrap();
    for (n, v) in ALPHA_ONE {
        assert!(close(psi_norm_sq(n, &g).unwrap().value_sq, v, 1e-10), "N={n}");
    }
    for (n, v) in &ALPHA_ONE[..2] {
        let c = PoleConfiguration::equispaced(*n);
        assert!(close(norm_sq_gram(&c, &g).unwrap().value_sq, *v, 1e-10));
        assert!(close(norm_sq_quadrature(&c, &g).unwrap().value_sq, *v, 1e-8));
    }
}

#[test]
fn psi_norms_alpha_two_and_half() {
    let g = Weight::power(2.0).unwrap();
    for (n, v) in ALPHA_TWO {
        assert!(close(psi_norm_sq(n, &g).unwrap().value_sq, v, 1e-10), "N={n}");
        assert!(close(
            norm_sq_gram(&PoleConfiguration::equispaced(n), &g).unwrap().value_sq,
            v,
            1e-9
        ));
    }
    let g = Weight::power(0.5).unwrap();
    for (n, v) in ALPHA_HALF {
        assert!(close(psi_norm_sq(n, &g).unwrap().value_sq, v, 1e-10), "N={n}");
        assert!(close(
            norm_sq_gram(&PoleConfiguration::equispaced(n), &g).unwrap().value_sq,
            v,
            1e-9
        ));
    }
}

#[test]
fn limit_constants() {
    assert!(close(limit_constant(1.0).unwrap(), PI * PI / 3.0, 1e-13));
    // 6ζ(3) and Γ(5/2)ζ(3/2)
    assert!(close(limit_constant(2.0).unwrap(), 7.212_341_418_957_565_7, 1e-12));
    assert!(close(limit_constant(0.5).unwrap(), 3.472_736_060_091_175_5, 1e-12));
}

#[test]
fn rho_values() {
    assert!(close(rho(1.0, 3.0).unwrap(), 2.0 / (2f64.sqrt() - 1.0).powi(2), 1e-14));
    assert!(close(rho(0.5, 2.0).unwrap(), 3.0, 1e-14));
    assert_eq!(rho(7.0, 1.0).unwrap(), 1.0);
}

#[test]
fn annulus_energy_two_poles() {
    // Ψ₂ = 2z/(z² - 1): I = Σ_k 4 ∫₀^{1/2} v^{2k-1} dv = 2 ln(4/3)
    let a = annulus_energy(&PoleConfiguration::new(vec![0.0, PI]).unwrap()).unwrap();
    assert!(close(a.quadrature, 2.0 * (4.0f64 / 3.0).ln(), 1e-10));
    assert!(close(a.taylor_proxy, 2.0 * (4.0f64 / 3.0).ln(), 1e-13));
}
