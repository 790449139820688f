use super::{check_positive, solve_threshold, CapacityError, CapacityPoint, DetectionScheme, Method};
use crate::channel::{sample_irradiance, ChannelModel};
use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub count: usize,
}

impl MeanEstimate {
    /// Two-pass mean and standard error, summed in input order.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                standard_error: f64::NAN,
                count: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            standard_error: (var / n as f64).sqrt(),
            count: n,
        }
    }

    pub fn from_fn(values: &[f64], f: impl Fn(f64) -> f64) -> Self {
        let mapped: Vec<f64> = values.iter().map(|&v| f(v)).collect();
        Self::from_values(&mapped)
    }

    /// `|mean - reference| <= sigmas · standard_error`.
    pub fn within(&self, reference: f64, sigmas: f64) -> bool {
        (self.mean - reference).abs() <= sigmas * self.standard_error
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloCapacity {
    pub point: CapacityPoint,
    /// Standard error of `point.capacity`, nats.
    pub standard_error: f64,
    pub samples: usize,
}

/// Empirical waterfilled spectral efficiency `(1/k) mean(ln(λ/μ)⁺)` over
/// seeded draws, with `μ` from the closed-form constraint.
pub fn capacity_monte_carlo(
    model: &ChannelModel,
    scheme: DetectionScheme,
    snr: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloCapacity, CapacityError> {
    check_positive("snr", snr)?;
    scheme.check_validity(snr)?;
    let mu = solve_threshold(model, snr)?;
    let draws = sample_irradiance(model, seed, samples)?;
    let est = MeanEstimate::from_fn(&draws, |l| if l > mu { (l / mu).ln() } else { 0.0 });
    Ok(MonteCarloCapacity {
        point: CapacityPoint {
            snr,
            threshold: mu,
            capacity: est.mean / scheme.k(),
            method: Method::MonteCarlo,
            scheme,
        },
        standard_error: est.standard_error / scheme.k(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_estimate_basics() {
        let e = MeanEstimate::from_values(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.standard_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(e.within(2.6, 1.0));
        assert!(MeanEstimate::from_values(&[]).mean.is_nan());
    }
}
