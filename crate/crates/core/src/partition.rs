use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;

use crate::algebra::DivisionAlgebra;
use crate::error::{domain, Error, Result};

/// An integer partition `k_1 >= k_2 >= ... > 0`.
///
/// Only the nonzero parts are stored, so two partitions differing by
/// trailing zeros compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition, rejecting increasing sequences. Trailing zeros are dropped.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return domain(format!("parts must be weakly decreasing: {parts:?}"));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.last() != Some(&0));
        Self { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The `i`-th part (0-based), zero past the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn first_part(&self) -> u32 {
        self.part(0)
    }

    pub fn conjugate(&self) -> Self {
        let first = self.first_part() as usize;
        let parts = (1..=first as u32).map(|i| self.parts.iter().filter(|&&k| k >= i).count() as u32).collect();
        Self { parts }
    }

    /// Cells `(i, j)` of the Young diagram, 1-based, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts.iter().enumerate().flat_map(|(i, &k)| (1..=k as usize).map(move |j| (i + 1, j)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .or_else(|| t.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .unwrap_or(t);
        let mut parts = Vec::new();
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v = tok.parse::<u32>().map_err(|_| Error::Parse(format!("bad partition part {tok:?} in {s:?}")))?;
            parts.push(v);
        }
        Partition::new(parts).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// All partitions of `k` with at most `max_parts` parts and, optionally, first
/// part at most `max_first_part`, in reverse-lexicographic order.
pub fn enumerate_partitions(k: u32, max_parts: usize, max_first_part: Option<u32>) -> Vec<Partition> {
    let mut out = Vec::new();
    let cap = max_first_part.map_or(k, |r| r.min(k));
    let mut cur = Vec::with_capacity(max_parts);
    fill(k, cap, max_parts, &mut cur, &mut out);
    out
}

fn fill(rest: u32, cap: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition::from_sorted(cur.clone()));
        return;
    }
    if slots == 0 {
        return;
    }
    // Largest part first gives reverse-lexicographic order.
    let hi = cap.min(rest);
    let lo = rest.div_ceil(slots as u32);
    for p in (lo.max(1)..=hi).rev() {
        cur.push(p);
        fill(rest - p, p, slots - 1, cur, out);
        cur.pop();
    }
}

pub fn conjugate(p: &Partition) -> Partition {
    p.conjugate()
}

/// Dominance order: `tau <= kappa` iff every prefix sum of `tau` is at most
/// the matching prefix sum of `kappa`.
pub fn dominance_leq(tau: &Partition, kappa: &Partition) -> Result<bool> {
    if tau.weight() != kappa.weight() {
        return domain(format!("dominance order needs equal weights ({} vs {})", tau.weight(), kappa.weight()));
    }
    let n = tau.len().max(kappa.len());
    let (mut st, mut sk) = (0u32, 0u32);
    for i in 0..n {
        st += tau.part(i);
        sk += kappa.part(i);
        if st > sk {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Upper and lower hook lengths of a partition and their product `nu`.
#[derive(Clone, Debug)]
pub struct HookData {
    pub cells: Vec<(usize, usize)>,
    pub upper: Vec<Ratio<i64>>,
    pub lower: Vec<Ratio<i64>>,
    pub nu: BigRational,
}

impl HookData {
    pub fn nu_f64(&self) -> f64 {
        self.nu.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Upper hook `k'_j - i + alpha (k_i - j + 1)` and lower hook
/// `k'_j - i + 1 + alpha (k_i - j)` at every cell, with their total product.
pub fn hook_product(p: &Partition, algebra: DivisionAlgebra) -> Result<HookData> {
    if p.is_empty() {
        return domain("hook product of the empty partition is undefined");
    }
    let alpha = algebra.alpha();
    let conj = p.conjugate();
    let mut cells = Vec::with_capacity(p.weight() as usize);
    let mut upper = Vec::with_capacity(cells.capacity());
    let mut lower = Vec::with_capacity(cells.capacity());
    let mut nu = BigRational::from_integer(BigInt::from(1));
    for (i, j) in p.cells() {
        let arm = p.part(i - 1) as i64 - j as i64;
        let leg = conj.part(j - 1) as i64 - i as i64;
        let up = Ratio::from_integer(leg) + alpha * (arm + 1);
        let lo = Ratio::from_integer(leg + 1) + alpha * arm;
        nu *= big(up) * big(lo);
        cells.push((i, j));
        upper.push(up);
        lower.push(lo);
    }
    Ok(HookData { cells, upper, lower, nu })
}

fn big(r: Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `ln nu` in floating point, for the evaluation paths.
pub(crate) fn ln_hook_product(p: &Partition, alpha: f64) -> f64 {
    let conj = p.conjugate();
    let mut acc = 0.0;
    for (i, j) in p.cells() {
        let arm = p.part(i - 1) as f64 - j as f64;
        let leg = conj.part(j - 1) as f64 - i as f64;
        acc += (leg + alpha * (arm + 1.0)).ln() + (leg + 1.0 + alpha * arm).ln();
    }
    acc
}
