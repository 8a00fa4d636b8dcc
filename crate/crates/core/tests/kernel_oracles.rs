//! Kernel values against oracles computed independently of the λ-quadrature:
//! G_s(r) = 2 (r/2)^(s/2) K_(s/2)(r) and G_s'(r) = -2 (r/2)^(s/2) K_(s/2-1)(r)
//! evaluated with 30-digit Bessel functions, and the radial moments
//! integrated in the same arithmetic.

use frax_core::functionals::sphere_area;
use frax_core::kernel::{
    energy_constant_dt, energy_constant_frac, energy_constant_grad, eval_g, eval_g_prime, fourier_symbol,
    moment_constant, poisson_kernel, refinement_change, LaguerreRule,
};
use frax_core::{FraxError, Params};

fn rel(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// (s, r, G_s(r), G_s'(r)).
const BESSEL_VALUES: [(f64, f64, f64, f64); 16] = [
    (0.5, 0.01, 3.2791236466696128135, -17.307571142078726949),
    (0.5, 0.5, 1.358092370886961206, -1.8268101092883251143),
    (0.5, 2.0, 0.23075655368171351394, -0.25580595725835805266),
    (0.5, 10.0, 5.3333661234715446597e-5, -5.4621356902809210266e-5),
    (1.5, 0.01, 1.2238300920432466939, -0.23186905669092437097),
    (1.5, 0.5, 0.91340505464416255714, -0.679046185443480603),
    (1.5, 2.0, 0.25580595725835805266, -0.23075655368171351394),
    (1.5, 10.0, 1.221370670579587678e-4, -1.192576920097691052e-4),
    (0.25, 0.01, 5.2160678788287823632, -57.919475263022425379),
    (0.25, 0.5, 1.5695955991087759592, -2.4411400960631995728),
    (0.25, 2.0, 0.228526671176433576, -0.2666718090691927662),
    (0.25, 10.0, 4.3516949165336102566e-5, -4.5102275320370229146e-5),
    (1.9, 0.01, 1.0310987021484869762, -0.062220522042345807361),
    (1.9, 0.5, 0.84047367285143285025, -0.49614174955313851994),
    (1.9, 2.0, 0.27422949174261241481, -0.22790582733673806926),
    (1.9, 10.0, 1.7127070315011663891e-4, -1.6407280599884176372e-4),
];

#[test]
fn profile_matches_bessel_closed_form() {
    let rule = LaguerreRule::shared();
    for (s, r, g, gp) in BESSEL_VALUES {
        let got = eval_g(s, r, rule).unwrap();
        assert!(rel(got, g) < 1e-9, "G_{s}({r}) = {got}, expected {g}");
        let got = eval_g_prime(s, r, rule).unwrap();
        assert!(rel(got, gp) < 1e-9, "G'_{s}({r}) = {got}, expected {gp}");
    }
}

#[test]
fn moment_constants_match_frozen_values() {
    let rule = LaguerreRule::shared();
    for (s, a, want) in [
        (1.5, 0.5, 0.51347840650769040675),
        (0.5, 0.0, 0.22847329052223181269),
        (0.25, -0.5, 0.36708721186274223756),
        (1.9, 2.0, 0.79265407463679683236),
    ] {
        let prm = Params::new(1, s).unwrap();
        let got = moment_constant(&prm, a, rule).unwrap();
        assert!(rel(got, want) < 1e-7, "C(s={s}, a={a}) = {got}, expected {want}");
    }
}

#[test]
fn energy_constants_match_frozen_values() {
    let rule = LaguerreRule::shared();
    for (s, beta, want) in [
        (1.5, 1.0, 0.36473993587107943981),
        (0.5, 0.5, 0.35849159811459374652),
        (1.9, 2.5, 1.0709243834351429934),
        (0.25, 0.3, 0.27073393044605643902),
        // Γ(0.1) / 2^0.1
        (1.0, 1.9, 8.876416548097335068),
    ] {
        let prm = Params::new(1, s).unwrap().with_beta(beta);
        let got = energy_constant_dt(&prm, rule).unwrap();
        assert!(rel(got, want) < 1e-7, "dt constant (s={s}, beta={beta}) = {got}, expected {want}");
    }
    for (s, beta, want) in [
        (1.5, 1.0, 1.0942198076132383194),
        (0.25, 0.3, 0.30258498108676895502),
        (1.9, 1.5, 2.1362882691021782498),
    ] {
        let prm = Params::new(1, s).unwrap().with_beta(beta);
        let got = energy_constant_grad(&prm, rule).unwrap();
        assert!(rel(got, want) < 1e-7, "grad constant (s={s}, beta={beta}) = {got}, expected {want}");
        assert!(got > energy_constant_dt(&prm, rule).unwrap());
    }
    for (s, gamma, beta, want) in [
        (1.5, 0.75, 0.9, 1.2734751005558855561),
        (0.5, 1.0, 0.8, 0.16862865892274194388),
        // Γ(3/2) / 2^(3/2)
        (1.0, 1.0, 0.5, 0.3133285343288750628),
    ] {
        let prm = Params::new(1, s).unwrap().with_beta(beta).with_gamma(gamma);
        let got = energy_constant_frac(&prm, rule).unwrap();
        assert!(rel(got, want) < 1e-7, "frac constant (s={s}, gamma={gamma}, beta={beta}) = {got}");
    }
}

#[test]
fn windows_reject_their_boundaries() {
    let rule = LaguerreRule::shared();
    let at_edge = Params::new(1, 1.0).unwrap().with_beta(2.0);
    assert!(matches!(energy_constant_dt(&at_edge, rule), Err(FraxError::DivergentMoment(_))));
    assert!(energy_constant_grad(&at_edge, rule).is_err());
    let frac_edge = Params::new(1, 1.0).unwrap().with_beta(1.0).with_gamma(0.5);
    assert!(energy_constant_frac(&frac_edge, rule).is_err());
    assert!(moment_constant(&Params::new(1, 1.0).unwrap(), -1.0, rule).is_err());
}

#[test]
fn constants_converge_when_the_rule_doubles() {
    for (s, beta, gamma) in [(0.25, 0.2, 0.5), (0.5, 0.6, 1.0), (1.0, 1.0, 0.75), (1.5, 1.0, 1.0), (1.9, 1.5, 1.2)] {
        let prm = Params::new(1, s).unwrap().with_beta(beta).with_gamma(gamma);
        let changes = [
            refinement_change(200, |r| moment_constant(&prm, 0.5, r)).unwrap(),
            refinement_change(200, |r| energy_constant_dt(&prm, r)).unwrap(),
            refinement_change(200, |r| energy_constant_grad(&prm, r)).unwrap(),
            refinement_change(200, |r| energy_constant_frac(&prm, r)).unwrap(),
        ];
        for c in changes {
            assert!(c < 1e-8, "s={s}: constant moved by {c:e} between 200 and 400 nodes");
        }
    }
}

#[test]
fn symbol_is_one_at_zero_frequency_and_kernel_has_unit_mass() {
    let rule = LaguerreRule::shared();
    for n in 1..=3 {
        for s in [0.25, 0.5, 1.0, 1.5, 1.9] {
            let prm = Params::new(n, s).unwrap();
            for t in [0.1, 1.0, 7.0] {
                assert_eq!(fourier_symbol(&prm, t, 0.0, rule).unwrap(), 1.0);
            }
            let t = 0.7;
            let mass = radial_mass(&prm, t);
            assert!((mass - 1.0).abs() < 1e-3, "n={n} s={s}: mass {mass}");
        }
    }
}

/// |S^(n-1)| ∫ r^(n-1) p_t(r e₁) dr: Simpson in ln r up to R = 1e4 t, then the
/// two leading terms of the r^(-1-s) (1 + t²/r²)^(-(n+s)/2) tail.
fn radial_mass(prm: &Params, t: f64) -> f64 {
    let n = prm.n;
    let (lo, hi) = ((t * 1e-8).ln(), (t * 1e4).ln());
    let m = 20_000;
    let h = (hi - lo) / m as f64;
    let point = |u: f64| {
        let r = u.exp();
        let mut x = vec![0.0; n];
        x[0] = r;
        poisson_kernel(prm, &x, t).unwrap() * r.powi(n as i32)
    };
    let mut body = point(lo) + point(hi);
    for k in 1..m {
        body += point(lo + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    body *= h / 3.0;
    let big_r = hi.exp();
    let s = prm.s;
    let lead = {
        let mut x = vec![0.0; n];
        x[0] = big_r;
        // p_t(R) (R² + t²)^((n+s)/2) is the constant c t^s.
        poisson_kernel(prm, &x, t).unwrap() * (big_r * big_r + t * t).powf((n as f64 + s) / 2.0)
    };
    let tail = lead
        * (big_r.powf(-s) / s - (n as f64 + s) / 2.0 * t * t * big_r.powf(-s - 2.0) / (s + 2.0));
    sphere_area(n) * (body + tail)
}

#[test]
fn profile_is_decreasing_with_negative_derivative() {
    let rule = LaguerreRule::shared();
    for s in [0.25, 0.5, 1.0, 1.5, 1.9] {
        let mut prev = f64::INFINITY;
        for k in 0..60 {
            let r = 1e-3 * 1.25f64.powi(k);
            let g = eval_g(s, r, rule).unwrap();
            assert!(g < prev, "G_{s} not decreasing at r = {r}");
            prev = g;
            assert!(eval_g_prime(s, r, rule).unwrap() < 0.0);
        }
    }
}
