use std::f64::consts::PI;

use anisotest_core::geometry::{Point, PointPattern, Window};
use anisotest_core::processes::{
    sim_gibbs_lj, sim_plcp, sim_poisson, sim_strauss, sim_thomas, BirthDeathMove, LennardJones, LgcpSimulator,
    ModelSpec,
};
use anisotest_core::rng::RngStream;
use anisotest_core::summaries::{k_cyl_hat, RangeGrid};

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn dispersion(counts: &[f64]) -> f64 {
    let (m, sd) = mean_sd(counts);
    sd * sd / m
}

fn small() -> Window {
    Window::centered_square(0.5).unwrap()
}

fn unit() -> Window {
    Window::centered_square(1.0).unwrap()
}

fn lgcp(sigma2: f64, a: f64) -> ModelSpec {
    ModelSpec::Lgcp {
        mu: 400f64.ln() - sigma2 / 2.0,
        sigma2,
        scale: 0.02,
        a,
        theta: PI / 6.0,
    }
}

/// Per-simulation difference of the mean K_cyl value along theta and along
/// theta + pi/2.
fn kcyl_axis_difference(pat: &PointPattern, theta: f64) -> f64 {
    let grid = RangeGrid::new(pat.window().min_side() / 4.0, 25).unwrap();
    let mean = |alpha: f64| {
        let c = k_cyl_hat(pat, alpha, 0.15, &grid).unwrap();
        c.values.iter().sum::<f64>() / c.len() as f64
    };
    mean(theta) - mean(theta + PI / 2.0)
}

fn assert_rotation_invariant(mut draw: impl FnMut(&mut RngStream) -> PointPattern, sims: usize, seed: u64) {
    let mut rng = RngStream::from_seed(seed);
    let d: Vec<f64> = (0..sims)
        .map(|_| kcyl_axis_difference(&draw(&mut rng), PI / 6.0))
        .collect();
    let (m, sd) = mean_sd(&d);
    assert!(m.abs() < 3.0 * sd / (sims as f64).sqrt(), "mean difference {m}, sd {sd}");
}

#[test]
fn lgcp_mean_count_is_400() {
    let sim = LgcpSimulator::new(&lgcp(3.0, 1.0), &unit()).unwrap();
    let mut rng = RngStream::from_seed(100);
    let counts: Vec<f64> = (0..500).map(|_| sim.simulate(&mut rng).len() as f64).collect();
    let (m, sd) = mean_sd(&counts);
    assert!((m - 400.0).abs() < 3.0 * sd / (500f64).sqrt(), "mean {m}, sd {sd}");
}

#[test]
fn lgcp_without_variance_is_poisson() {
    let sim = LgcpSimulator::new(&lgcp(0.0, 1.0), &unit()).unwrap();
    let mut rng = RngStream::from_seed(101);
    let counts: Vec<f64> = (0..500).map(|_| sim.simulate(&mut rng).len() as f64).collect();
    let d = dispersion(&counts);
    assert!((0.8..1.2).contains(&d), "dispersion {d}");
}

#[test]
fn lgcp_stretching_orients_pairs() {
    let sim = LgcpSimulator::new(&lgcp(3.0, 0.6), &unit()).unwrap();
    let mut rng = RngStream::from_seed(102);
    let d: Vec<f64> = (0..200)
        .map(|_| kcyl_axis_difference(&sim.simulate(&mut rng), PI / 6.0))
        .collect();
    assert!(mean_sd(&d).0 > 0.0);
}

#[test]
fn lgcp_isotropic_at_a_one() {
    let sim = LgcpSimulator::new(&lgcp(3.0, 1.0), &small()).unwrap();
    assert_rotation_invariant(|rng| sim.simulate(rng), 500, 1103);
}

#[test]
fn plcp_isotropic_at_a_one() {
    let m = ModelSpec::paper_plcp(1.0);
    assert_rotation_invariant(|rng| sim_plcp(&m, &small(), rng).unwrap(), 500, 104);
}

#[test]
fn gibbs_isotropic_at_a_one() {
    let m = ModelSpec::paper_gibbs(1.0);
    assert_rotation_invariant(|rng| sim_gibbs_lj(&m, &small(), 5_000, rng).unwrap(), 100, 105);
}

#[test]
fn plcp_mean_count_near_400() {
    let m = ModelSpec::paper_plcp(0.6);
    let mut rng = RngStream::from_seed(106);
    let counts: Vec<f64> = (0..500).map(|_| sim_plcp(&m, &unit(), &mut rng).unwrap().len() as f64).collect();
    let (mean, _) = mean_sd(&counts);
    assert!((mean - 400.0).abs() < 20.0, "mean {mean}");
}

#[test]
fn gibbs_without_interaction_is_poisson() {
    let m = ModelSpec::GibbsLj {
        alpha_chem: -(100f64.ln()),
        rho: 0.0,
        sigma: 0.02,
        eps_cone: PI / 4.0,
        a: 1.0,
        theta: 0.0,
    };
    let mut rng = RngStream::from_seed(107);
    let counts: Vec<f64> = (0..200)
        .map(|_| sim_gibbs_lj(&m, &unit(), 50_000, &mut rng).unwrap().len() as f64)
        .collect();
    let d = dispersion(&counts);
    assert!((0.7..1.3).contains(&d), "dispersion {d}");
    let (mean, sd) = mean_sd(&counts);
    assert!((mean - 100.0).abs() < 3.0 * sd / (200f64).sqrt(), "mean {mean}");
}

#[test]
fn gibbs_wall_keeps_points_apart() {
    let m = ModelSpec::paper_gibbs(0.6);
    let (_, s2) = LennardJones::from_spec(&m).unwrap().sigmas();
    let mut rng = RngStream::from_seed(108);
    let (mut close, mut total) = (0usize, 0usize);
    for _ in 0..200 {
        let pat = sim_gibbs_lj(&m, &small(), 10_000, &mut rng).unwrap();
        let pts = pat.points();
        for (i, p) in pts.iter().enumerate() {
            let nn = pts
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| p.dist(*q))
                .fold(f64::INFINITY, f64::min);
            total += 1;
            if nn < s2 / 2.0 {
                close += 1;
            }
        }
    }
    assert!((close as f64) < 0.01 * total as f64, "{close} of {total}");
}

#[test]
fn chain_energy_stays_finite_and_consistent() {
    let m = ModelSpec::paper_gibbs(0.4);
    let lj = LennardJones::from_spec(&m).unwrap();
    let mut rng = RngStream::from_seed(109);
    let w = Window::centered_square(0.2).unwrap();
    let mut chain = BirthDeathMove::from_poisson(lj, w, &mut rng).unwrap();
    for _ in 0..1000 {
        chain.step(&mut rng);
        assert!(chain.energy().is_finite());
    }
    assert!(chain.points().len() <= 50, "{}", chain.points().len());
    assert!((chain.energy() - chain.full_energy()).abs() < 1e-8);
}

#[test]
fn thomas_mean_count() {
    let m = ModelSpec::Thomas {
        kappa_parent: 50.0,
        mu_off: 8.0,
        sigma_off: 0.02,
    };
    let mut rng = RngStream::from_seed(110);
    let counts: Vec<f64> = (0..500).map(|_| sim_thomas(&m, &unit(), &mut rng).unwrap().len() as f64).collect();
    let (mean, sd) = mean_sd(&counts);
    assert!((mean - 400.0).abs() < 3.0 * sd / (500f64).sqrt(), "mean {mean}, sd {sd}");
    assert!(dispersion(&counts) > 2.0);
}

#[test]
fn thomas_wide_clusters_look_poisson() {
    let m = ModelSpec::Thomas {
        kappa_parent: 50.0,
        mu_off: 8.0,
        sigma_off: 10.0,
    };
    let mut rng = RngStream::from_seed(111);
    let counts: Vec<f64> = (0..200).map(|_| sim_thomas(&m, &unit(), &mut rng).unwrap().len() as f64).collect();
    let d = dispersion(&counts);
    assert!((0.7..1.3).contains(&d), "dispersion {d}");
}

#[test]
fn strauss_without_interaction_is_poisson() {
    let m = ModelSpec::Strauss {
        beta: 100.0,
        gamma: 1.0,
        rd: 0.05,
    };
    let mut rng = RngStream::from_seed(112);
    let counts: Vec<f64> = (0..200)
        .map(|_| sim_strauss(&m, &unit(), 50_000, &mut rng).unwrap().len() as f64)
        .collect();
    let d = dispersion(&counts);
    assert!((0.7..1.3).contains(&d), "dispersion {d}");
}

fn close_pairs(pts: &[Point], r: f64) -> usize {
    let mut s = 0;
    for j in 1..pts.len() {
        for i in 0..j {
            if pts[i].dist(pts[j]) <= r {
                s += 1;
            }
        }
    }
    s
}

#[test]
fn strauss_pair_counts_fall_with_gamma() {
    let mut rng = RngStream::from_seed(113);
    let means: Vec<f64> = [1.0, 0.6, 0.2]
        .iter()
        .map(|&gamma| {
            let m = ModelSpec::Strauss { beta: 200.0, gamma, rd: 0.05 };
            let s: Vec<f64> = (0..30)
                .map(|_| close_pairs(sim_strauss(&m, &unit(), 50_000, &mut rng).unwrap().points(), 0.05) as f64)
                .collect();
            mean_sd(&s).0
        })
        .collect();
    assert!(means[0] > means[1] && means[1] > means[2], "{means:?}");
}

#[test]
fn every_simulator_is_deterministic_and_inside() {
    let w = small();
    let models = [
        ModelSpec::Poisson { lambda: 400.0 },
        lgcp(3.0, 0.6),
        ModelSpec::paper_gibbs(0.6),
        ModelSpec::paper_plcp(0.6),
        ModelSpec::Thomas {
            kappa_parent: 50.0,
            mu_off: 8.0,
            sigma_off: 0.02,
        },
        ModelSpec::Strauss {
            beta: 400.0,
            gamma: 0.3,
            rd: 0.03,
        },
    ];
    for m in models {
        let a = m.simulate(&w, &mut RngStream::from_seed(7)).unwrap();
        let b = m.simulate(&w, &mut RngStream::from_seed(7)).unwrap();
        assert_eq!(a, b, "{}", m.name());
        assert!(a.points().iter().all(|p| w.contains(*p)));
    }
    assert!(sim_poisson(400.0, &w, &mut RngStream::from_seed(1)).unwrap().len() > 0);
}
