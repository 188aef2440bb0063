use crate::error::{Error, Result};
use crate::tensor::BandedMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionRule {
    Uniform,
    Geometric { beta: f64 },
}

/// Step sizes `tau_0 .. tau_{n-1}` of a time grid on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    taus: Vec<f64>,
    rule: PartitionRule,
}

impl TimePartition {
    pub fn uniform(t_final: f64, n_steps: usize) -> Result<Self> {
        if n_steps == 0 || t_final <= 0.0 {
            return Err(Error::InvalidInput("time partition needs steps and T > 0".into()));
        }
        Ok(Self {
            taus: vec![t_final / n_steps as f64; n_steps],
            rule: PartitionRule::Uniform,
        })
    }

    /// Geometric steps `tau_n = beta^(n-1) tau_1`, extended to `n = 0` by the
    /// same rule (`tau_0 = tau_1 / beta`) so that all steps are distinct.
    pub fn geometric(t_final: f64, n_steps: usize, beta: f64) -> Result<Self> {
        if n_steps == 0 || t_final <= 0.0 || !(beta > 1.0) {
            return Err(Error::InvalidInput("geometric partition needs steps, T > 0 and beta > 1".into()));
        }
        let tau0 = t_final * (beta - 1.0) / (beta.powi(n_steps as i32) - 1.0);
        let taus = (0..n_steps).map(|n| tau0 * beta.powi(n as i32)).collect();
        Ok(Self {
            taus,
            rule: PartitionRule::Geometric { beta },
        })
    }

    pub fn from_steps(taus: Vec<f64>) -> Result<Self> {
        if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::InvalidInput("time steps must be positive".into()));
        }
        Ok(Self {
            taus,
            rule: PartitionRule::Uniform,
        })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn rule(&self) -> PartitionRule {
        self.rule
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// Implicit-Euler time matrix: lower bidiagonal with `1/tau_n` on the
/// diagonal and `-1/tau_n` below it.
pub fn fd_time_operator(partition: &TimePartition) -> BandedMatrix {
    let n = partition.len();
    let mut m = BandedMatrix::zeros(n, 1, 0);
    for (i, &tau) in partition.taus().iter().enumerate() {
        m.set(i, i, 1.0 / tau);
        if i > 0 {
            m.set(i, i - 1, -1.0 / tau);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_quarter_steps() {
        let a = fd_time_operator(&TimePartition::uniform(1.0, 4).unwrap());
        for i in 0..4 {
            assert_eq!(a.get(i, i), 4.0);
            if i > 0 {
                assert_eq!(a.get(i, i - 1), -4.0);
            }
        }
        assert_eq!(a.upper_bw(), 0);
    }

    #[test]
    fn geometric_steps_sum_to_t_and_are_distinct() {
        let p = TimePartition::geometric(1.0, 3, 2.0).unwrap();
        assert!((p.taus().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let a = fd_time_operator(&p);
        let d: Vec<f64> = (0..3).map(|i| a.get(i, i)).collect();
        assert!(d[0] != d[1] && d[1] != d[2] && d[0] != d[2]);
        for n in 1..3 {
            assert!((p.taus()[n] - 2f64.powi(n as i32 - 1) * p.taus()[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TimePartition::geometric(1.0, 4, 1.0).is_err());
        assert!(TimePartition::uniform(1.0, 0).is_err());
        assert!(TimePartition::from_steps(vec![0.1, -0.1]).is_err());
    }
}
