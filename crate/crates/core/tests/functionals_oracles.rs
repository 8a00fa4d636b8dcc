use std::f64::consts::PI;

use frax_core::field::{catalog, extend, Component, ExtensionPlan, GridFunction, GridSpec};
use frax_core::functionals::{
    affine_energy, besov_seminorm, hardy_functional, lorentz_norm, lp_norm, maximal_function,
    nontangential_max, sobolev_dot_norm, sphere_area, weighted_energy, BesovQ, LorentzP,
    WeightedEnergySpec,
};
use frax_core::kernel::LaguerreRule;
use frax_core::Params;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

fn gaussian(n: usize, half_width: f64, points: usize) -> GridFunction {
    let spec = GridSpec::new(n, half_width, points).unwrap();
    catalog::by_name("gaussian", n).unwrap().sample(&spec).unwrap()
}

#[test]
fn gaussian_norms_have_closed_forms() {
    let f = gaussian(1, 12.0, 512);
    assert!((lp_norm(&f, 2.0).unwrap() - PI.powf(0.25)).abs() < 1e-12);
    assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 1.0);
    assert!((lp_norm(&f.scale(3.0).unwrap(), 1.0).unwrap() - 3.0 * (2.0 * PI).sqrt()).abs() < 1e-10);
    let centered = f.mean_zero();
    assert!((sobolev_dot_norm(&centered, 0.0).unwrap() - lp_norm(&centered, 2.0).unwrap()).abs() < 1e-10);
    // (2π)^(-1) ∫ |ξ| 2π e^(-ξ²) dξ = 1; the kink of |ξ| at the origin limits the
    // frequency sum to second order in the frequency step.
    let wide = gaussian(1, 64.0, 2048);
    assert!((sobolev_dot_norm(&wide, 0.5).unwrap() - 1.0).abs() < 1e-3);
    for (name, sigma) in [("gaussian", 0.5), ("gaussian", 1.0), ("gaussian-difference", -0.3)] {
        let base = catalog::by_name(name, 1).unwrap();
        let reference = sobolev_dot_norm(&base.sample(wide.spec()).unwrap(), sigma).unwrap();
        for lambda in [0.5, 2.0] {
            let g = base.clone().dilated(lambda).sample(wide.spec()).unwrap();
            let want = lambda.powf(sigma - 0.5) * reference;
            let got = sobolev_dot_norm(&g, sigma).unwrap();
            assert!(((got - want) / want).abs() < 1e-3, "{name} λ={lambda} σ={sigma}: {got} vs {want}");
        }
    }
}

#[test]
fn hardy_functional_of_a_gaussian() {
    // ∫ e^(-x²) |x|^(-β) dx = Γ((1-β)/2).
    let f = gaussian(1, 12.0, 2048);
    let got = hardy_functional(&f, 0.5).unwrap();
    let want = gamma(0.25);
    assert!(((got - want) / want).abs() < 5e-3, "{got} vs {want}");

    let spec = GridSpec::new(1, 12.0, 256).unwrap();
    let away = catalog::by_name("bump", 1).unwrap().translated(&[6.0]).sample(&spec).unwrap();
    let plain: f64 = away
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| spec.point(*i)[0] != 0.0)
        .map(|(i, v)| v * v * spec.point(i)[0].abs().powf(-0.5))
        .sum::<f64>()
        * spec.cell_volume();
    assert_eq!(hardy_functional(&away, 0.5).unwrap(), plain);
}

#[test]
fn lorentz_small_cases_and_dense_oracle() {
    for p in [LorentzP::Finite(0.7), LorentzP::Finite(2.0), LorentzP::Infinity] {
        let got = lorentz_norm(&[(3.0, 0.5), (-3.0, 0.5)], 1.5, p).unwrap();
        assert!((got - 3.0).abs() < 1e-14, "{p:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let atoms: Vec<(f64, f64)> = (0..10).map(|_| (rng.gen_range(-4.0..4.0), rng.gen_range(0.1..2.0))).collect();
    let (q, p) = (1.7, 2.5);
    let top = atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max);
    let m = 1_000_000;
    let dl = top / m as f64;
    let mut sum = 0.0;
    for k in 0..m {
        let lambda = (k as f64 + 0.5) * dl;
        let mass: f64 = atoms.iter().filter(|a| a.0.abs() > lambda).map(|a| a.1).sum();
        sum += p * lambda.powf(p - 1.0) * mass.powf(p / q) * dl;
    }
    let want = sum.powf(1.0 / p);
    let got = lorentz_norm(&atoms, q, LorentzP::Finite(p)).unwrap();
    assert!(((got - want) / want).abs() < 1e-4, "{got} vs {want}");
}

#[test]
fn halving_t_min_barely_moves_the_energy() {
    let spec = GridSpec::new(1, 16.0, 512).unwrap();
    let f = catalog::by_name("gaussian", 1).unwrap().sample(&spec).unwrap();
    let prm = Params::new(1, 1.0).unwrap().with_beta(1.0);
    let energy = |t_min: f64| {
        let spec = spec.with_t_bounds(t_min, spec.t_max).unwrap();
        let f = f.clone().with_spec(spec).unwrap();
        let plan = ExtensionPlan::new(&f, &prm, LaguerreRule::shared()).unwrap();
        weighted_energy(&plan.gradient().unwrap(), &WeightedEnergySpec::gradient(1.0)).unwrap().total
    };
    let (a, b) = (energy(spec.t_min), energy(spec.t_min / 2.0));
    assert!(((a - b) / a).abs() < 5e-3, "{a} vs {b}");
    assert_eq!(
        weighted_energy(&[frax_core::field::ExtensionField::constant(spec, 0.0)], &WeightedEnergySpec::time_derivative(0.5))
            .unwrap()
            .total,
        0.0
    );
}

#[test]
fn besov_seminorm_basic_cases() {
    let spec = GridSpec::new(1, 8.0, 128).unwrap();
    let c = GridFunction::from_fn(spec, |_| 2.5).unwrap();
    assert_eq!(besov_seminorm(&c, 0.5, 2.0, BesovQ::Finite(2.0)).unwrap(), 0.0);
    let f = catalog::by_name("bump", 1).unwrap().sample(&spec).unwrap();
    let a = besov_seminorm(&f, 0.7, 2.0, BesovQ::Infinity).unwrap();
    for shift in [-17, 3, 40] {
        let b = besov_seminorm(&f.lattice_shift(&[shift]), 0.7, 2.0, BesovQ::Infinity).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }
    assert!(besov_seminorm(&f, 2.0, 2.0, BesovQ::Finite(2.0)).is_err());
}

/// sup |p_t ∗ f(x - y)| / ((1 + |y|/t)^n Mf(x)) over levels, points and offsets.
fn poisson_maximal_constant(f: &GridFunction, prm: &Params) -> f64 {
    let u = extend(f, prm).unwrap();
    let m = maximal_function(f);
    let spec = *f.spec();
    let big_n = spec.points_per_axis as i64;
    let h = spec.spacing();
    let mut worst: f64 = 0.0;
    for (j, &t) in u.t_levels().iter().enumerate() {
        let level = u.level(j);
        for x in (0..big_n).step_by(4) {
            for y in (-big_n / 2..big_n / 2).step_by(3) {
                let idx = (x - y).rem_euclid(big_n) as usize;
                let bound = (1.0 + (y as f64 * h).abs() / t) * m.values()[x as usize];
                worst = worst.max(level[idx].abs() / bound);
            }
        }
    }
    worst
}

#[test]
fn poisson_averages_are_controlled_by_the_maximal_function() {
    let spec = GridSpec::new(1, 8.0, 128).unwrap().with_t_range(0.01, 30.0, 16).unwrap();
    let mut constants = Vec::new();
    for s in [0.5, 1.0, 1.5] {
        let prm = Params::new(1, s).unwrap();
        for name in catalog::NAMES {
            for lambda in [0.5, 1.0, 2.0] {
                let f = catalog::by_name(name, 1).unwrap().dilated(lambda).sample(&spec).unwrap();
                constants.push(poisson_maximal_constant(&f, &prm));
            }
        }
    }
    let worst = constants.iter().copied().fold(0.0, f64::max);
    println!("empirical Poisson-maximal constant: {worst:.4}");
    assert!(worst.is_finite() && worst > 0.0 && worst < 10.0);
}

#[test]
fn nontangential_over_maximal_is_uniform_across_dilates() {
    let spec = GridSpec::new(1, 16.0, 256).unwrap().with_t_range(1e-4, 60.0, 30).unwrap();
    let prm = Params::new(1, 0.8).unwrap();
    let mut thetas = Vec::new();
    for name in ["gaussian", "bump", "plateau", "gaussian-difference"] {
        for k in 0..5 {
            let lambda = 2f64.powf(k as f64 / 2.0 - 1.0);
            let f = catalog::by_name(name, 1).unwrap().dilated(lambda).sample(&spec).unwrap();
            let nt = nontangential_max(&extend(&f, &prm).unwrap());
            let m = maximal_function(&f);
            let theta = nt.values().iter().zip(m.values()).map(|(a, b)| a / b).fold(0.0, f64::max);
            thetas.push(theta);
        }
    }
    let (lo, hi) = thetas.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    println!("empirical theta over 20 functions: {hi:.4} (smallest {lo:.4})");
    assert!(hi.is_finite() && hi / lo < 4.0);

    let u = frax_core::field::ExtensionField::constant(spec, 1.5);
    assert!(nontangential_max(&u).values().iter().all(|&v| v == 1.5));
}

#[test]
fn affine_energy_of_a_radial_field() {
    let spec = GridSpec::new(2, 8.0, 64).unwrap().with_t_range(0.02, 40.0, 24).unwrap();
    let f = catalog::by_name("gaussian", 2).unwrap().sample(&spec).unwrap();
    let prm = Params::new(2, 1.0).unwrap().with_p(1.5).with_alpha(0.5);
    let u = extend(&f, &prm).unwrap();
    let e = affine_energy(&u, &prm, 64).unwrap();
    let norms = &e.direction_norms;
    let mean = norms.iter().sum::<f64>() / norms.len() as f64;
    assert!(norms.iter().all(|v| ((v - mean) / mean).abs() < 0.02));
    // Equal directional norms N give c |S^(n-1)|^(-1/n) N.
    let mut min_norm = f64::INFINITY;
    let mut max_norm: f64 = 0.0;
    for &v in norms {
        min_norm = min_norm.min(v);
        max_norm = max_norm.max(v);
    }
    let scale = e.constant * sphere_area(2).powf(-0.5);
    assert!(e.value >= scale * min_norm * (1.0 - 1e-6) && e.value <= scale * max_norm * (1.0 + 1e-6));

    let doubled = affine_energy(&u, &prm, 128).unwrap();
    assert!(((doubled.value - e.value) / e.value).abs() < 1e-3);
}

#[test]
fn direction_integral_is_invariant_under_volume_preserving_stretch() {
    let base = catalog::by_name("gaussian-difference", 2).unwrap();
    let spec = GridSpec::new(2, 24.0, 256).unwrap().with_t_range(0.02, 100.0, 28).unwrap();
    let prm = Params::new(2, 1.0).unwrap().with_p(1.5).with_alpha(0.0);
    let integral = |lambda: f64| {
        let matrix = [lambda, 0.0, 0.0, 1.0 / lambda];
        let g = base.sample_transformed(&spec, &matrix).unwrap().mean_zero();
        let plan = ExtensionPlan::transformed(&g, &prm, LaguerreRule::shared(), &matrix).unwrap();
        let u = plan.field(Component::Value).unwrap();
        affine_energy(&u, &prm, 128).unwrap().value
    };
    let reference = integral(1.0);
    for lambda in [2.0, 4.0] {
        let v = integral(lambda);
        let drift = ((v - reference) / reference).abs();
        println!("stretch {lambda}: affine energy drift {:.3}%", 100.0 * drift);
        assert!(drift < 0.02, "stretch {lambda}: {v} vs {reference}");
    }
}
