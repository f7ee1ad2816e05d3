use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pairwise compatibility table `phi[row][col]`, rows indexed by the first
/// variable's state and columns by the second's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialMatrix<S>(pub [[S; 2]; 2]);

impl<S: Scalar> PotentialMatrix<S> {
    pub fn new(entries: [[S; 2]; 2]) -> Result<Self> {
        let flat = entries.iter().flatten();
        if flat.clone().any(|v| !v.is_finite() || *v < S::zero()) {
            return Err(Error::InvalidConstraint(
                "potential entries must be finite and non-negative".into(),
            ));
        }
        if flat.clone().all(|v| *v == S::zero()) {
            return Err(Error::InvalidConstraint(
                "potential needs at least one positive entry".into(),
            ));
        }
        Ok(Self(entries))
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> S {
        self.0[row][col]
    }

    pub fn transpose(&self) -> Self {
        let m = self.0;
        Self([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn is_symmetric(&self) -> bool {
        self.0[0][1] == self.0[1][0]
    }

    pub fn cast<T: Scalar>(&self) -> PotentialMatrix<T> {
        PotentialMatrix(self.0.map(|row| row.map(|v| T::lit(v.as_f64()))))
    }
}

/// Broader-topic inclusion, rows = broader topic `p`, columns = narrower
/// topic `c`: the state `p = 0, c = 1` is forbidden and `p = c = 1` favored.
pub fn inclusion_potential<S: Scalar>() -> PotentialMatrix<S> {
    PotentialMatrix([
        [S::lit(0.5), S::lit(0.0)],
        [S::lit(0.5), S::lit(10.0)],
    ])
}

/// Pair exclusion: at most one of the two topics is active.
pub fn exclusion_potential<S: Scalar>() -> PotentialMatrix<S> {
    PotentialMatrix([
        [S::lit(0.5), S::lit(0.5)],
        [S::lit(0.5), S::lit(0.0)],
    ])
}
