use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::seeded_rng;

/// Eigenvalues `λ_0 ≤ … ≤ λ_{N-1}` of the truncated operator `D`, which is
/// diagonal in the working basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Requires a non-empty, finite, ascending list.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite eigenvalue {x}")));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpectrum("eigenvalues not sorted ascending".into()));
        }
        Ok(Self { values })
    }

    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| a.total_cmp(b));
        Self::new(values)
    }

    /// The `n` eigenvalues `±(k + 1/2)` of smallest modulus (the Dirac
    /// operator on the circle with antiperiodic spinors); pairs `±λ` give
    /// `λ²` multiplicity two.
    pub fn dirac_circle(n: usize) -> Result<Self> {
        let values = (0..n)
            .map(|i| {
                let mag = (i / 2) as f64 + 0.5;
                if i % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        Self::from_unsorted(values)
    }

    /// The first `n` entries of `base` with every eigenvalue repeated
    /// `multiplicity` times.
    pub fn with_multiplicity(base: &Spectrum, multiplicity: usize, n: usize) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::InvalidSpectrum("multiplicity must be positive".into()));
        }
        let values: Vec<f64> = base
            .values
            .iter()
            .flat_map(|&x| std::iter::repeat_n(x, multiplicity))
            .take(n)
            .collect();
        if values.len() < n {
            return Err(Error::InvalidSpectrum(format!(
                "base spectrum too short for {n} eigenvalues"
            )));
        }
        Self::new(values)
    }

    /// `λ_k = k - (n-1)/2`.
    pub fn linear(n: usize) -> Result<Self> {
        let shift = (n as f64 - 1.0) / 2.0;
        Self::new((0..n).map(|k| k as f64 - shift).collect())
    }

    /// `n` independent uniform draws from `[-cutoff, cutoff]`.
    pub fn random_uniform(n: usize, cutoff: f64, seed: u64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::OutOfRange(format!("cutoff = {cutoff}")));
        }
        let mut rng = seeded_rng(seed, 0);
        Self::from_unsorted((0..n).map(|_| rng.random_range(-cutoff..=cutoff)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn squares(&self) -> Vec<f64> {
        self.values.iter().map(|l| l * l).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// The truncation to the first `n` eigenvalues.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        Self::new(self.values[..n.min(self.len())].to_vec())
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        assert_eq!(
            Spectrum::dirac_circle(5).unwrap().values(),
            &[-1.5, -0.5, 0.5, 1.5, 2.5]
        );
        assert_eq!(Spectrum::linear(4).unwrap().values(), &[-1.5, -0.5, 0.5, 1.5]);
        let r = Spectrum::random_uniform(6, 2.0, 9).unwrap();
        assert_eq!(r, Spectrum::random_uniform(6, 2.0, 9).unwrap());
        assert!(r.max_abs() <= 2.0);
    }

    #[test]
    fn invariants_enforced() {
        assert!(Spectrum::new(vec![]).is_err());
        assert!(Spectrum::new(vec![1.0, 0.0]).is_err());
        assert!(Spectrum::new(vec![f64::INFINITY]).is_err());
        assert!(serde_json::from_str::<Spectrum>("[2.0, 1.0]").is_err());
    }
}
