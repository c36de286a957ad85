use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// One of the four normed division algebras, identified by its real
/// dimension `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisionAlgebra {
    beta: u32,
}

impl DivisionAlgebra {
    pub const REAL: Self = Self { beta: 1 };
    pub const COMPLEX: Self = Self { beta: 2 };
    pub const QUATERNION: Self = Self { beta: 4 };
    pub const OCTONION: Self = Self { beta: 8 };

    pub const ALL: [Self; 4] = [Self::REAL, Self::COMPLEX, Self::QUATERNION, Self::OCTONION];

    pub fn new(beta: u32) -> Result<Self> {
        match beta {
            1 | 2 | 4 | 8 => Ok(Self { beta }),
            _ => Err(Error::Domain(format!("beta must be one of 1, 2, 4, 8 (got {beta})"))),
        }
    }

    pub fn beta(self) -> u32 {
        self.beta
    }

    pub fn beta_f64(self) -> f64 {
        self.beta as f64
    }

    /// `beta / 2`, the shift between consecutive rows in Pochhammer symbols.
    pub fn half_beta(self) -> f64 {
        self.beta as f64 / 2.0
    }

    /// The Jack parameter `alpha = 2 / beta`, exact.
    pub fn alpha(self) -> Ratio<i64> {
        Ratio::new(2, self.beta as i64)
    }

    pub fn alpha_f64(self) -> f64 {
        2.0 / self.beta as f64
    }

    /// Matrix sampling is implemented for the associative algebras only.
    pub fn supports_sampling(self) -> bool {
        self.beta <= 4
    }

    pub fn require_sampling(self) -> Result<()> {
        if self.supports_sampling() {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "matrix sampling is not available for beta = 8 (octonions); use the analytic path".into(),
            ))
        }
    }
}

impl fmt::Display for DivisionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.beta {
            1 => "real",
            2 => "complex",
            4 => "quaternion",
            _ => "octonion",
        };
        write!(f, "{name} (beta={})", self.beta)
    }
}

impl TryFrom<u32> for DivisionAlgebra {
    type Error = Error;

    fn try_from(beta: u32) -> Result<Self> {
        Self::new(beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_four_betas() {
        for b in 0..20 {
            assert_eq!(DivisionAlgebra::new(b).is_ok(), matches!(b, 1 | 2 | 4 | 8));
        }
    }

    #[test]
    fn alpha_times_beta_is_two() {
        for a in DivisionAlgebra::ALL {
            assert_eq!(a.alpha() * Ratio::from_integer(a.beta() as i64), Ratio::from_integer(2));
        }
    }
}
