use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates whose replicate variance falls below this are dropped from
/// standardised statistics.
pub const MIN_VARIANCE: f64 = 1e-12;

/// Scalar summary of a functional deviation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatKind {
    #[serde(rename = "MS")]
    Ms,
    #[serde(rename = "MS_RangeStd")]
    MsRangeStd,
    #[serde(rename = "MS_DirStd")]
    MsDirStd,
}

impl StatKind {
    pub fn label(self) -> &'static str {
        match self {
            StatKind::Ms => "MS",
            StatKind::MsRangeStd => "MS_RangeStd",
            StatKind::MsDirStd => "MS_DirStd",
        }
    }

    pub fn is_standardised(self) -> bool {
        !matches!(self, StatKind::Ms)
    }
}

impl std::str::FromStr for StatKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ms" => Ok(StatKind::Ms),
            "ms_rangestd" | "ms-range-std" | "rangestd" => Ok(StatKind::MsRangeStd),
            "ms_dirstd" | "ms-dir-std" | "dirstd" => Ok(StatKind::MsDirStd),
            _ => Err(Error::InvalidArgument(format!("unknown statistic '{s}'"))),
        }
    }
}

/// How the replicate statistics are centred and scaled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recentering {
    /// Mean and variances from all replicates, shared by every statistic.
    #[default]
    Plugin,
    /// Replicate `i` is compared with the mean and variances of the others.
    Loo,
}

/// Direction of the Monte Carlo p-value count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueOrientation {
    /// Count replicates at least as large as the observed statistic.
    #[default]
    Standard,
    /// Count replicates at most as large as the observed statistic.
    AsPrinted,
}

/// Observed and replicate statistics with the centring used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatOutcome {
    pub t0: f64,
    pub t_rep: Vec<f64>,
    pub m_hat: Vec<f64>,
    /// Unbiased replicate variances; empty for the unstandardised statistic.
    pub var_hat: Vec<f64>,
    pub dropped: Vec<usize>,
}

fn check_lengths(v0: &[f64], reps: &[Vec<f64>], min_reps: usize) -> Result<()> {
    if reps.len() < min_reps {
        return Err(Error::InvalidArgument(format!(
            "statistic needs at least {min_reps} replicates, got {}",
            reps.len()
        )));
    }
    if let Some(r) = reps.iter().find(|r| r.len() != v0.len()) {
        return Err(Error::LengthMismatch {
            expected: v0.len(),
            got: r.len(),
        });
    }
    Ok(())
}

fn mean(reps: &[&Vec<f64>], len: usize) -> Vec<f64> {
    let n = reps.len() as f64;
    (0..len).map(|k| reps.iter().map(|r| r[k]).sum::<f64>() / n).collect()
}

fn variance(reps: &[&Vec<f64>], m: &[f64]) -> Vec<f64> {
    let n = reps.len() as f64;
    (0..m.len())
        .map(|k| reps.iter().map(|r| (r[k] - m[k]).powi(2)).sum::<f64>() / (n - 1.0))
        .collect()
}

fn squared_deviation(v: &[f64], m: &[f64]) -> f64 {
    v.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn standardised_deviation(v: &[f64], m: &[f64], var: &[f64], keep: &[bool]) -> f64 {
    (0..v.len())
        .filter(|&k| keep[k] && var[k] >= MIN_VARIANCE)
        .map(|k| (v[k] - m[k]).powi(2) / var[k])
        .sum()
}

fn others(reps: &[Vec<f64>], skip: usize) -> Vec<&Vec<f64>> {
    reps.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, r)| r).collect()
}

/// Mean squared deviation `(v - m)^T (v - m)` about the replicate mean.
pub fn stat_ms(v0: &[f64], reps: &[Vec<f64>], recentering: Recentering) -> Result<StatOutcome> {
    let min = if recentering == Recentering::Loo { 3 } else { 2 };
    check_lengths(v0, reps, min)?;
    let all: Vec<&Vec<f64>> = reps.iter().collect();
    let m = mean(&all, v0.len());
    let t_rep = match recentering {
        Recentering::Plugin => reps.iter().map(|r| squared_deviation(r, &m)).collect(),
        Recentering::Loo => (0..reps.len())
            .map(|i| squared_deviation(&reps[i], &mean(&others(reps, i), v0.len())))
            .collect(),
    };
    Ok(StatOutcome {
        t0: squared_deviation(v0, &m),
        t_rep,
        m_hat: m,
        var_hat: Vec::new(),
        dropped: Vec::new(),
    })
}

/// Standardised mean squared deviation `(v - m)^T C^-1 (v - m)` with the
/// diagonal of unbiased replicate variances. Coordinates with variance below
/// [`MIN_VARIANCE`] are dropped for every statistic.
pub fn stat_ms_std(v0: &[f64], reps: &[Vec<f64>], recentering: Recentering) -> Result<StatOutcome> {
    let min = if recentering == Recentering::Loo { 4 } else { 3 };
    check_lengths(v0, reps, min)?;
    let all: Vec<&Vec<f64>> = reps.iter().collect();
    let m = mean(&all, v0.len());
    let var = variance(&all, &m);
    let keep: Vec<bool> = var.iter().map(|&v| v >= MIN_VARIANCE).collect();
    let dropped: Vec<usize> = (0..var.len()).filter(|&k| !keep[k]).collect();
    if dropped.len() == var.len() {
        return Err(Error::DegenerateEnsemble);
    }
    let t_rep = match recentering {
        Recentering::Plugin => reps.iter().map(|r| standardised_deviation(r, &m, &var, &keep)).collect(),
        Recentering::Loo => (0..reps.len())
            .map(|i| {
                let rest = others(reps, i);
                let mi = mean(&rest, v0.len());
                let vi = variance(&rest, &mi);
                standardised_deviation(&reps[i], &mi, &vi, &keep)
            })
            .collect(),
    };
    Ok(StatOutcome {
        t0: standardised_deviation(v0, &m, &var, &keep),
        t_rep,
        m_hat: m,
        var_hat: var,
        dropped,
    })
}

pub fn compute_statistic(kind: StatKind, v0: &[f64], reps: &[Vec<f64>], recentering: Recentering) -> Result<StatOutcome> {
    match kind {
        StatKind::Ms => stat_ms(v0, reps, recentering),
        StatKind::MsRangeStd | StatKind::MsDirStd => stat_ms_std(v0, reps, recentering),
    }
}

/// Monte Carlo p-value `(1 + #{T_i >= T_0}) / (1 + N)`; ties count against
/// rejection.
pub fn mc_p_value(t0: f64, t_rep: &[f64]) -> f64 {
    mc_p_value_oriented(t0, t_rep, PValueOrientation::Standard)
}

pub fn mc_p_value_oriented(t0: f64, t_rep: &[f64], orientation: PValueOrientation) -> f64 {
    let count = match orientation {
        PValueOrientation::Standard => t_rep.iter().filter(|&&t| t >= t0).count(),
        PValueOrientation::AsPrinted => t_rep.iter().filter(|&&t| t <= t0).count(),
    };
    (1 + count) as f64 / (1 + t_rep.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ms_arithmetic() {
        let reps = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let out = stat_ms(&[1.0, 2.0], &reps, Recentering::Plugin).unwrap();
        assert_eq!(out.m_hat, vec![0.0, 0.0]);
        assert_eq!(out.t0, 5.0);
        let at_mean = stat_ms(&[0.0, 0.0], &reps, Recentering::Plugin).unwrap();
        assert_eq!(at_mean.t0, 0.0);
    }

    #[test]
    fn ms_std_arithmetic() {
        // mean (0, 0), unbiased variances (1, 4)
        let reps = vec![vec![1.0, 2.0], vec![-1.0, -2.0], vec![0.0, 0.0]];
        let out = stat_ms_std(&[1.0, 2.0], &reps, Recentering::Plugin).unwrap();
        assert_eq!(out.var_hat, vec![1.0, 4.0]);
        assert_eq!(out.t0, 2.0);
    }

    #[test]
    fn constant_coordinate_is_dropped() {
        let reps = vec![vec![3.0, 1.0], vec![3.0, -1.0], vec![3.0, 0.0]];
        let out = stat_ms_std(&[5.0, 1.0], &reps, Recentering::Plugin).unwrap();
        assert_eq!(out.dropped, vec![0]);
        assert_eq!(out.t0, 1.0);
        let flat = vec![vec![1.0], vec![1.0], vec![1.0]];
        assert!(matches!(stat_ms_std(&[0.0], &flat, Recentering::Plugin), Err(Error::DegenerateEnsemble)));
    }

    #[test]
    fn length_guard() {
        let reps = vec![vec![1.0], vec![1.0, 2.0]];
        assert!(matches!(stat_ms(&[0.0], &reps, Recentering::Plugin), Err(Error::LengthMismatch { .. })));
        assert!(stat_ms(&[0.0], &[], Recentering::Plugin).is_err());
    }

    #[test]
    fn p_value_examples() {
        let reps: Vec<f64> = (0..19).map(f64::from).collect();
        assert_eq!(mc_p_value(100.0, &reps), 0.05);
        assert_eq!(mc_p_value(2.0, &[2.0; 9]), 1.0);
        let mut r = vec![0.0; 95];
        r.extend([5.0; 4]);
        assert_eq!(mc_p_value(5.0, &r), 0.05);
        assert_eq!(mc_p_value_oriented(100.0, &reps, PValueOrientation::AsPrinted), 1.0);
    }

    #[test]
    fn loo_differs_from_plugin() {
        let reps = vec![vec![1.0], vec![2.0], vec![4.0], vec![8.0]];
        let a = stat_ms(&[3.0], &reps, Recentering::Plugin).unwrap();
        let b = stat_ms(&[3.0], &reps, Recentering::Loo).unwrap();
        assert_eq!(a.t0, b.t0);
        // replicate 0 vs mean of the others (14/3)
        assert!((b.t_rep[0] - (1.0f64 - 14.0 / 3.0).powi(2)).abs() < 1e-12);
        assert_ne!(a.t_rep, b.t_rep);
    }
}
