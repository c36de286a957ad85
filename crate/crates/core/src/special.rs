//! Multivariate gamma and beta functions, their weighted variants and the
//! generalized Pochhammer symbol.

use std::fmt;

use crate::algebra::DivisionAlgebra;
use crate::error::{domain, Error, Result};
use crate::partition::Partition;

/// `(ln |Gamma(x)|, sign Gamma(x))`; `sign` is 0 at poles.
pub fn ln_gamma_signed(x: f64) -> (f64, i32) {
    if x <= 0.0 && x == x.floor() {
        return (f64::INFINITY, 0);
    }
    let (lg, s) = libm::lgamma_r(x);
    (lg, s)
}

pub fn ln_gamma(x: f64) -> f64 {
    ln_gamma_signed(x).0
}

pub(crate) fn ln_factorial(k: u32) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `ln (c)_n` for `c > 0`.
pub(crate) fn ln_pochhammer_pos(c: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 16 {
        (0..n).map(|j| (c + j as f64).ln()).sum()
    } else {
        ln_gamma(c + n as f64) - ln_gamma(c)
    }
}

/// Rising factorial `(a)_n`, by direct product.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (a + j as f64))
}

/// `[a]_k = prod_i (a - (i-1) beta/2)_{k_i}`.
pub fn gen_pochhammer(a: f64, p: &Partition, algebra: DivisionAlgebra) -> f64 {
    let hb = algebra.half_beta();
    p.parts().iter().enumerate().fold(1.0, |acc, (i, &k)| acc * pochhammer(a - i as f64 * hb, k))
}

fn ln_pi_power(m: usize, algebra: DivisionAlgebra) -> f64 {
    (m * (m - 1)) as f64 * algebra.beta_f64() / 4.0 * std::f64::consts::PI.ln()
}

// Sum ln Gamma over a multiset of arguments in a canonical (sorted) order so
// that reindexed products agree bit-for-bit.
fn ln_gamma_product(mut args: Vec<f64>) -> (f64, i32) {
    args.sort_by(|a, b| a.total_cmp(b));
    let mut acc = 0.0;
    let mut sign = 1;
    for a in args {
        let (lg, s) = ln_gamma_signed(a);
        if s == 0 {
            return (f64::INFINITY, 0);
        }
        acc += lg;
        sign *= s;
    }
    (acc, sign)
}

fn mv_gamma_args(m: usize, algebra: DivisionAlgebra, a: f64) -> Vec<f64> {
    let hb = algebra.half_beta();
    (0..m).map(|i| a - i as f64 * hb).collect()
}

fn check_mv_gamma(m: usize, algebra: DivisionAlgebra, a: f64) -> Result<()> {
    if m == 0 {
        return domain("m must be at least 1");
    }
    let bound = (m - 1) as f64 * algebra.half_beta();
    if !(a > bound) {
        return domain(format!(
            "multivariate gamma requires a > (m-1)beta/2 = {bound} (got a = {a}, m = {m}, beta = {})",
            algebra.beta()
        ));
    }
    Ok(())
}

/// `ln Gamma_m[a]`.
pub fn ln_mv_gamma(m: usize, algebra: DivisionAlgebra, a: f64) -> Result<f64> {
    check_mv_gamma(m, algebra, a)?;
    Ok(ln_pi_power(m, algebra) + ln_gamma_product(mv_gamma_args(m, algebra, a)).0)
}

/// `Gamma_m[a] = pi^{m(m-1)beta/4} prod_i Gamma(a - (i-1) beta/2)`.
pub fn mv_gamma(m: usize, algebra: DivisionAlgebra, a: f64) -> Result<f64> {
    finite(ln_mv_gamma(m, algebra, a)?.exp(), "multivariate gamma")
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("{what} overflows f64; use the log-scale variant")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightSign {
    Plus,
    Minus,
}

impl fmt::Display for WeightSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightSign::Plus => "+",
            WeightSign::Minus => "-",
        })
    }
}

/// Arguments of `Gamma_m[a, k]` (sign `+`) or `Gamma_m[a, -k]` (sign `-`).
#[derive(Clone, Debug)]
pub struct WeightedGammaQuery {
    pub a: f64,
    pub m: usize,
    pub algebra: DivisionAlgebra,
    pub weight: Partition,
    pub sign: WeightSign,
}

impl WeightedGammaQuery {
    pub fn new(a: f64, m: usize, algebra: DivisionAlgebra, weight: Partition, sign: WeightSign) -> Self {
        Self { a, m, algebra, weight, sign }
    }

    /// Lower bound on `a`: `(m-1)beta/2 - k_m` for `+`, `(m-1)beta/2 + k_1` for `-`.
    pub fn bound(&self) -> f64 {
        let base = self.m.saturating_sub(1) as f64 * self.algebra.half_beta();
        match self.sign {
            WeightSign::Plus => base - self.weight.part(self.m.saturating_sub(1)) as f64,
            WeightSign::Minus => base + self.weight.first_part() as f64,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.m == 0 {
            return domain("m must be at least 1");
        }
        if self.weight.len() > self.m {
            return domain(format!("weight {} has more than m = {} parts", self.weight, self.m));
        }
        let b = self.bound();
        if !(self.a > b) {
            let cond = match self.sign {
                WeightSign::Plus => "a > (m-1)beta/2 - k_m",
                WeightSign::Minus => "a > (m-1)beta/2 + k_1",
            };
            return domain(format!("weighted gamma requires {cond} = {b} (got a = {})", self.a));
        }
        Ok(())
    }

    fn args(&self) -> Vec<f64> {
        let hb = self.algebra.half_beta();
        let m = self.m;
        (0..m)
            .map(|i| {
                let k = self.weight.part(i) as f64;
                match self.sign {
                    WeightSign::Plus => self.a + k - i as f64 * hb,
                    WeightSign::Minus => self.a - k - (m - 1 - i) as f64 * hb,
                }
            })
            .collect()
    }
}

/// `ln Gamma_m[a, +-k]` from the product form. All factors are positive on the valid domain.
pub fn ln_mv_gamma_weighted(q: &WeightedGammaQuery) -> Result<f64> {
    q.check()?;
    Ok(ln_pi_power(q.m, q.algebra) + ln_gamma_product(q.args()).0)
}

/// `Gamma_m[a, k] = pi^{m(m-1)beta/4} prod_i Gamma(a + k_i - (i-1)beta/2)` or
/// `Gamma_m[a, -k] = pi^{m(m-1)beta/4} prod_i Gamma(a - k_i - (m-i)beta/2)`.
pub fn mv_gamma_weighted(q: &WeightedGammaQuery) -> Result<f64> {
    finite(ln_mv_gamma_weighted(q)?.exp(), "weighted multivariate gamma")
}

/// `ln B_m[a, b]`.
pub fn ln_mv_beta(m: usize, algebra: DivisionAlgebra, a: f64, b: f64) -> Result<f64> {
    let la = ln_mv_gamma(m, algebra, a)?;
    let lb = ln_mv_gamma(m, algebra, b)?;
    let lab = ln_mv_gamma(m, algebra, a + b)?;
    Ok(la + lb - lab)
}

/// `B_m[a, b] = Gamma_m[a] Gamma_m[b] / Gamma_m[a + b]`.
pub fn mv_beta(m: usize, algebra: DivisionAlgebra, a: f64, b: f64) -> Result<f64> {
    finite(ln_mv_beta(m, algebra, a, b)?.exp(), "multivariate beta")
}

/// Domain-unchecked variants, for analytic-continuation experiments.
///
/// These return the signed value of the product form wherever no factor sits
/// on a pole, and `NaN` otherwise.
pub mod unchecked {
    use super::*;

    pub fn mv_gamma(m: usize, algebra: DivisionAlgebra, a: f64) -> f64 {
        let (lg, s) = ln_gamma_product(mv_gamma_args(m, algebra, a));
        if s == 0 {
            return f64::NAN;
        }
        s as f64 * (ln_pi_power(m, algebra) + lg).exp()
    }

    pub fn mv_gamma_weighted(q: &WeightedGammaQuery) -> f64 {
        let (lg, s) = ln_gamma_product(q.args());
        if s == 0 {
            return f64::NAN;
        }
        s as f64 * (ln_pi_power(q.m, q.algebra) + lg).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mv_gamma_examples() {
        let r = DivisionAlgebra::REAL;
        assert!(rel(mv_gamma(1, r, 0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(mv_gamma(2, r, 1.5).unwrap(), PI / 2.0) < 1e-14);
        assert!(rel(mv_gamma(2, DivisionAlgebra::COMPLEX, 2.0).unwrap(), PI) < 1e-14);
        assert!(mv_gamma(2, r, 0.5).is_err());
        assert!(mv_gamma(3, DivisionAlgebra::QUATERNION, 4.0).is_err());
        assert!(ln_mv_gamma(2, r, 400.0).unwrap().is_finite());
        assert!(matches!(mv_gamma(2, r, 400.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn pochhammer_examples() {
        let a = 1.7;
        let alg = DivisionAlgebra::QUATERNION;
        assert_eq!(gen_pochhammer(a, &Partition::empty(), alg), 1.0);
        assert!(rel(gen_pochhammer(a, &part(&[2]), alg), a * (a + 1.0)) < 1e-15);
        assert!(rel(gen_pochhammer(a, &part(&[1, 1]), alg), a * (a - 2.0)) < 1e-15);
    }

    #[test]
    fn weighted_examples() {
        let r = DivisionAlgebra::REAL;
        let q = WeightedGammaQuery::new(3.0, 1, r, part(&[2]), WeightSign::Plus);
        assert!(rel(mv_gamma_weighted(&q).unwrap(), 24.0) < 1e-14);
        let q = WeightedGammaQuery::new(5.0, 1, r, part(&[2]), WeightSign::Minus);
        assert!(rel(mv_gamma_weighted(&q).unwrap(), 2.0) < 1e-14);
        let q = WeightedGammaQuery::new(2.3, 3, r, Partition::empty(), WeightSign::Plus);
        assert!(rel(mv_gamma_weighted(&q).unwrap(), mv_gamma(3, r, 2.3).unwrap()) < 1e-15);
        // below (m-1)beta/2 but above (m-1)beta/2 - k_m
        let q = WeightedGammaQuery::new(0.3, 2, r, part(&[1, 1]), WeightSign::Plus);
        assert!(mv_gamma_weighted(&q).unwrap() > 0.0);
        let q = WeightedGammaQuery::new(-0.6, 2, r, part(&[1, 1]), WeightSign::Plus);
        assert!(mv_gamma_weighted(&q).is_err());
        let q = WeightedGammaQuery::new(2.4, 2, r, part(&[2]), WeightSign::Minus);
        assert!(mv_gamma_weighted(&q).is_err());
    }

    #[test]
    fn weighted_identities_on_grid() {
        for alg in DivisionAlgebra::ALL {
            let hb = alg.half_beta();
            for m in 1..=4 {
                for k in 0..=6 {
                    for p in enumerate_partitions(k, m, None) {
                        for t in [0.3, 1.1, 2.7, 6.2] {
                            let a = (m - 1) as f64 * hb + t;
                            let plus = WeightedGammaQuery::new(a, m, alg, p.clone(), WeightSign::Plus);
                            let want = gen_pochhammer(a, &p, alg) * mv_gamma(m, alg, a).unwrap();
                            assert!(rel(mv_gamma_weighted(&plus).unwrap(), want) < 1e-12);
                            let a2 = a + p.first_part() as f64;
                            let minus = WeightedGammaQuery::new(a2, m, alg, p.clone(), WeightSign::Minus);
                            let lhs = mv_gamma_weighted(&minus).unwrap()
                                * gen_pochhammer(-a2 + (m - 1) as f64 * hb + 1.0, &p, alg);
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            assert!(rel(lhs, sign * mv_gamma(m, alg, a2).unwrap()) < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reindexed_products_agree_exactly() {
        // prod_i g(a - (i-1)b) over i = 1..m equals prod_i g(a - (m-i)b).
        for alg in DivisionAlgebra::ALL {
            let hb = alg.half_beta();
            for m in 1..=5 {
                let a = (m - 1) as f64 * hb + 0.77;
                let forward: Vec<f64> = (0..m).map(|i| a - i as f64 * hb).collect();
                let backward: Vec<f64> = (0..m).map(|i| a - (m - 1 - i) as f64 * hb).collect();
                assert_eq!(ln_gamma_product(forward).0.to_bits(), ln_gamma_product(backward).0.to_bits());
            }
        }
    }

    #[test]
    fn beta_examples_and_symmetry() {
        let r = DivisionAlgebra::REAL;
        assert!(rel(mv_beta(1, r, 1.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(mv_beta(1, r, 2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-14);
        let c = DivisionAlgebra::COMPLEX;
        let g2 = mv_gamma(2, c, 2.0).unwrap();
        let g4 = mv_gamma(2, c, 4.0).unwrap();
        assert!(rel(mv_beta(2, c, 2.0, 2.0).unwrap(), g2 * g2 / g4) < 1e-14);
        for (a, b) in [(1.3, 2.9), (4.1, 0.7), (3.3, 3.35)] {
            for m in 1..=3 {
                if let (Ok(x), Ok(y)) = (mv_beta(m, r, a, b), mv_beta(m, r, b, a)) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }

    #[test]
    fn unchecked_continuation() {
        let r = DivisionAlgebra::REAL;
        // Gamma_1[-0.5] = Gamma(-0.5) = -2 sqrt(pi)
        assert!(rel(unchecked::mv_gamma(1, r, -0.5), -2.0 * PI.sqrt()) < 1e-14);
        assert!(unchecked::mv_gamma(1, r, -1.0).is_nan());
    }
}
