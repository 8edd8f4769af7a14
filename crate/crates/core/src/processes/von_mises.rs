use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::rng::RngStream;

/// Draw from the von Mises distribution with mean direction `mu` and
/// concentration `kappa`, returned in `[0, 2 pi)`.
///
/// Best and Fisher's wrapped-Cauchy envelope rejection sampler, in the
/// cancellation-free form for the envelope parameter.
pub fn sample_von_mises(mu: f64, kappa: f64, rng: &mut RngStream) -> f64 {
    if kappa < 1e-8 {
        return rng.random_range(0.0..TAU);
    }
    let s = 0.5 / kappa;
    let r = s + (1.0 + s * s).sqrt();
    let w = loop {
        let u: f64 = rng.random();
        let z = (PI * u).cos();
        let w = (1.0 + r * z) / (r + z);
        let y = kappa * (r - w);
        let v: f64 = rng.random();
        if v > 0.0 && (y * (2.0 - y) - v >= 0.0 || (y / v).ln() + 1.0 - y >= 0.0) {
            break w;
        }
    };
    let mut theta = w.clamp(-1.0, 1.0).acos();
    if rng.random::<f64>() < 0.5 {
        theta = -theta;
    }
    let out = (mu + theta).rem_euclid(TAU);
    if out >= TAU {
        0.0
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circular_stats(draws: &[f64]) -> (f64, f64) {
        let (s, c) = draws
            .iter()
            .fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
        let n = draws.len() as f64;
        let mean = s.atan2(c);
        let resultant = (s * s + c * c).sqrt() / n;
        (mean, 1.0 - resultant)
    }

    #[test]
    fn zero_concentration_is_uniform() {
        let mut rng = RngStream::from_seed(5);
        let mut draws: Vec<f64> = (0..10_000).map(|_| sample_von_mises(1.0, 0.0, &mut rng)).collect();
        draws.sort_by(f64::total_cmp);
        // Kolmogorov-Smirnov against U(0, 2 pi); 1% critical value 1.63 / sqrt(n)
        let n = draws.len() as f64;
        let d = draws
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let f = x / TAU;
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / n.sqrt(), "KS statistic {d}");
        assert!(draws.iter().all(|x| (0.0..TAU).contains(x)));
    }

    #[test]
    fn high_concentration_centres_on_mu() {
        let mut rng = RngStream::from_seed(6);
        let mu = PI / 6.0;
        let draws: Vec<f64> = (0..10_000).map(|_| sample_von_mises(mu, 50.0, &mut rng)).collect();
        let (mean, _) = circular_stats(&draws);
        assert!((mean - mu).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn circular_variance_decreases_with_kappa() {
        let mut rng = RngStream::from_seed(8);
        let vars: Vec<f64> = [0.0, 1.0, 5.0, 50.0]
            .iter()
            .map(|&k| {
                let d: Vec<f64> = (0..10_000).map(|_| sample_von_mises(0.3, k, &mut rng)).collect();
                circular_stats(&d).1
            })
            .collect();
        assert!(vars.windows(2).all(|w| w[0] > w[1]), "{vars:?}");
    }
}
