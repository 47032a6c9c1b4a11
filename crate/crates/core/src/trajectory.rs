//! Time-stamped point sequences produced by flows and retractions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points `points[i]` (ambient coordinates, or row-major matrix entries) at `times[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

/// Rejects empty, non-finite or non-increasing time grids.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("time grid is empty".into()));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(
            "time grid has non-finite entries".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

impl Trajectory {
    pub fn new(times: Vec<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        check_grid(&times)?;
        if times.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: points.len(),
            });
        }
        let dim = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        Ok(Self { times, points })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Column names `t, x0, x1, …` matching [`Trajectory::rows`].
    pub fn header(&self) -> Vec<String> {
        std::iter::once("t".to_string())
            .chain((0..self.dim()).map(|i| format!("x{i}")))
            .collect()
    }

    /// One row `[t, x0, x1, …]` per sample.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.points)
            .map(|(t, p)| std::iter::once(*t).chain(p.iter().copied()).collect())
            .collect()
    }

    /// Largest deviation of a point norm from 1.
    pub fn max_unit_norm_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Trajectory::new(vec![0.0, 1.0], vec![vec![1.0], vec![2.0]]).is_ok());
        assert!(Trajectory::new(vec![], vec![]).is_err());
        assert!(Trajectory::new(vec![1.0, 1.0], vec![vec![1.0], vec![2.0]]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![vec![1.0]]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![vec![1.0], vec![2.0, 3.0]]).is_err());
    }

    #[test]
    fn rows_and_json() {
        let tr = Trajectory::new(vec![0.0, 0.5], vec![vec![1.0, 0.0], vec![0.6, 0.8]]).unwrap();
        assert_eq!(tr.header(), vec!["t", "x0", "x1"]);
        assert_eq!(tr.rows()[1], vec![0.5, 0.6, 0.8]);
        assert!(tr.max_unit_norm_error() < 1e-15);
        let json = serde_json::to_string(&tr).unwrap();
        assert_eq!(serde_json::from_str::<Trajectory>(&json).unwrap(), tr);
    }
}
