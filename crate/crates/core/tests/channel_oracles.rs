//! Channel statistics against quadrature, sampling and limiting cases.

use fso_capacity::capacity::MeanEstimate;
use fso_capacity::channel::{pdf_gg, pdf_pointing, sample_irradiance, sample_irradiance_geometric, tail_probability};
use fso_capacity::numerics::{integrate_interval, integrate_semi_infinite, ToleranceSpec};
use fso_capacity::{ChannelModel, TurbulenceRegime};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

fn models() -> Vec<(String, ChannelModel)> {
    let mut out = Vec::new();
    for r in TurbulenceRegime::ALL {
        let p = r.published();
        out.push((format!("{}/pe", r.name()), ChannelModel::with_pointing(p.a, p.b, p.xi, p.a0).unwrap()));
        out.push((format!("{}/gg", r.name()), ChannelModel::gamma_gamma(p.a, p.b).unwrap()));
    }
    out
}

fn tight() -> ToleranceSpec {
    ToleranceSpec::relative(1e-12)
}

/// `∫₀^∞ i^t f(i) di`, split at the peak gain so the density's kink at `A₀`
/// and any integrable singularity at 0 sit on interval ends.
fn moment_by_quadrature(m: &ChannelModel, t: f64) -> f64 {
    let split = m.peak_gain();
    let f = |i: f64| if i > 0.0 { i.powf(t) * m.pdf(i).unwrap() } else { 0.0 };
    integrate_interval(f, 0.0, split, tight()).unwrap().value + integrate_semi_infinite(f, split, tight()).unwrap().value
}

#[test]
fn densities_normalise_with_the_stated_mean() {
    for (name, m) in models() {
        let mass = moment_by_quadrature(&m, 0.0);
        let mean = moment_by_quadrature(&m, 1.0);
        assert!((mass - 1.0).abs() <= 1e-8, "{name}: mass {mass}");
        assert!((mean - m.mean_irradiance()).abs() <= 1e-7 * m.mean_irradiance(), "{name}: mean {mean}");
    }
}

#[test]
fn pointing_loss_mean() {
    let (xi, a0) = (1.0269f64, 0.0107);
    let mean = integrate_interval(|i| i * pdf_pointing(i, xi, a0).unwrap(), 0.0, a0, tight()).unwrap().value;
    assert!((mean - 0.005492).abs() <= 1e-6, "{mean}");
    let mass = integrate_interval(|i| pdf_pointing(i, xi, a0).unwrap(), 0.0, a0, tight()).unwrap().value;
    assert!((mass - 1.0).abs() < 1e-12);
}

#[test]
fn tail_matches_integrated_density() {
    let p = TurbulenceRegime::Strong.published();
    let m = ChannelModel::with_pointing(p.a, p.b, p.xi, p.a0).unwrap();
    let mu = 0.005;
    let f = |i: f64| m.pdf(i).unwrap();
    let q = integrate_interval(f, mu, p.a0, tight()).unwrap().value + integrate_semi_infinite(f, p.a0, tight()).unwrap().value;
    let t = tail_probability(mu, &m).unwrap();
    assert!(((t - q) / q).abs() <= 1e-8, "{t} vs {q}");
}

#[test]
fn composite_density_tends_to_gamma_gamma() {
    let p = TurbulenceRegime::Moderate.published();
    let composite = ChannelModel::with_pointing(p.a, p.b, 100.0, 1.0 - 1e-9).unwrap();
    for k in 0..=20 {
        let i = 0.1 + 0.145 * k as f64;
        let c = composite.pdf(i).unwrap();
        let g = pdf_gg(i, p.a, p.b).unwrap();
        assert!(((c - g) / g).abs() <= 1e-3, "i = {i}: {c} vs {g}");
    }
}

#[test]
fn turbulence_pushes_mass_to_small_gains() {
    let below: Vec<f64> = TurbulenceRegime::ALL
        .iter()
        .map(|r| {
            let p = r.published();
            ChannelModel::gamma_gamma(p.a, p.b).unwrap().cdf(0.01).unwrap()
        })
        .collect();
    assert!(below[0] <= below[1] && below[1] <= below[2], "{below:?}");
}

/// Upper bound on the Kolmogorov-Smirnov distance from the CDF evaluated at
/// `nodes` empirical quantiles, using monotonicity of both functions
/// between nodes.
fn ks_upper_bound(m: &ChannelModel, draws: &mut [f64], nodes: usize) -> f64 {
    draws.sort_by(|a, b| a.total_cmp(b));
    let n = draws.len();
    let idx: Vec<usize> = (1..nodes).map(|j| j * n / nodes).collect();
    let cdf: Vec<f64> = idx.par_iter().map(|&k| m.cdf(draws[k]).unwrap()).collect();
    let mut bound: f64 = 0.0;
    let mut prev_f = 0.0;
    let mut prev_emp = 0.0;
    for (j, &k) in idx.iter().enumerate() {
        // empirical CDF just below and at draws[k]
        let emp_left = k as f64 / n as f64;
        let emp = (k + 1) as f64 / n as f64;
        bound = bound.max(cdf[j] - prev_emp).max(emp_left - prev_f);
        prev_f = cdf[j];
        prev_emp = emp;
    }
    bound.max(1.0 - prev_emp).max(1.0 - prev_f)
}

#[test]
fn sampler_matches_cdf_in_kolmogorov_distance() {
    for (name, m) in models() {
        let mut draws = sample_irradiance(&m, 7, 1_000_000).unwrap();
        let d = ks_upper_bound(&m, &mut draws, 5000);
        assert!(d < 0.002, "{name}: KS bound {d}");
    }
}

#[test]
fn geometric_sampler_agrees_with_inverse_transform() {
    let p = TurbulenceRegime::Strong.published();
    let m = ChannelModel::with_pointing(p.a, p.b, p.xi, p.a0).unwrap();
    let mut draws = sample_irradiance_geometric(&m, 11, 1_000_000).unwrap();
    let mean = MeanEstimate::from_values(&draws);
    assert!(mean.within(m.mean_irradiance(), 3.0), "{mean:?}");
    let d = ks_upper_bound(&m, &mut draws, 5000);
    assert!(d < 0.002, "KS bound {d}");
}

#[test]
fn sample_moments_and_cdf_within_three_standard_errors() {
    let p = TurbulenceRegime::Strong.published();
    let gg = ChannelModel::gamma_gamma(p.a, p.b).unwrap();
    let draws = sample_irradiance(&gg, 3, 10_000_000).unwrap();
    let mean = MeanEstimate::from_values(&draws);
    assert!(mean.within(1.0, 3.0), "{mean:?}");

    let pe = ChannelModel::with_pointing(p.a, p.b, p.xi, p.a0).unwrap();
    let draws = sample_irradiance(&pe, 4, 10_000_000).unwrap();
    let below = MeanEstimate::from_fn(&draws, |l| if l <= 0.005 { 1.0 } else { 0.0 });
    assert!(below.within(1.0 - tail_probability(0.005, &pe).unwrap(), 3.0), "{below:?}");
}

#[test]
fn gamma_gamma_density_at_the_mode_matches_a_product_of_gammas_histogram() {
    let p = TurbulenceRegime::Weak.published();
    // mode by golden-section search on the density
    let (mut lo, mut hi) = (0.2f64, 1.5f64);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if pdf_gg(x1, p.a, p.b).unwrap() > pdf_gg(x2, p.a, p.b).unwrap() {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let mode = 0.5 * (lo + hi);
    let ga = Gamma::new(p.a, 1.0 / p.a).unwrap();
    let gb = Gamma::new(p.b, 1.0 / p.b).unwrap();
    let n = 10_000_000;
    let half = 0.01;
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let hits = (0..n)
        .filter(|_| {
            let x = ga.sample(&mut rng) * gb.sample(&mut rng);
            (x - mode).abs() < half
        })
        .count();
    let histogram = hits as f64 / (n as f64 * 2.0 * half);
    let exact = pdf_gg(mode, p.a, p.b).unwrap();
    assert!(((histogram - exact) / exact).abs() < 0.01, "{histogram} vs {exact}");
}
