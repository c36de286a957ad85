//! Hypergeometric functions of one and two matrix arguments.
//!
//! ```text
//! pFq(a; b; X)    = sum_k sum_{|K|=k} [a_1]_K..[a_p]_K / ([b_1]_K..[b_q]_K) C_K(X) / k!
//! pFq(a; b; X, Y) = same with C_K(X) C_K(Y) / C_K(I)
//! ```
//!
//! Sums run degree by degree and stop once `stall_window` consecutive degrees
//! each contribute (in absolute value) less than `rel_tol` of the running sum.

use crate::algebra::DivisionAlgebra;
use crate::error::{domain, Error, Result};
use crate::jack::{ln_jack_c_at_identity, JackTable, Neumaier, SpectralArgument};
use crate::partition::Partition;
use crate::special::ln_factorial;

#[derive(Clone, Debug, PartialEq)]
pub struct HypergeomSpec {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub algebra: DivisionAlgebra,
    pub m: usize,
}

impl HypergeomSpec {
    /// Rejects lower parameters for which some `-b + (j-1) beta/2`, `j <= m`, is a nonnegative integer.
    pub fn new(upper: Vec<f64>, lower: Vec<f64>, algebra: DivisionAlgebra, m: usize) -> Result<Self> {
        if m == 0 {
            return domain("m must be at least 1");
        }
        if let Some(v) = upper.iter().chain(&lower).find(|v| !v.is_finite()) {
            return domain(format!("hypergeometric parameters must be finite (got {v})"));
        }
        let hb = algebra.half_beta();
        for &b in &lower {
            for j in 0..m {
                let t = -b + j as f64 * hb;
                if t >= 0.0 && t == t.floor() {
                    return domain(format!(
                        "lower parameter b = {b} is a pole: -b + (j-1)beta/2 = {t} is a nonnegative integer for j = {}",
                        j + 1
                    ));
                }
            }
        }
        Ok(Self { upper, lower, algebra, m })
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// Degree beyond which every term vanishes, if an upper parameter is a nonpositive integer.
    pub fn terminating_degree(&self) -> Option<usize> {
        self.upper.iter().filter(|&&a| a <= 0.0 && a == a.floor()).map(|&a| self.m * (-a) as usize).min()
    }

    fn check_arg(&self, x: &SpectralArgument) -> Result<()> {
        if x.len() != self.m {
            return domain(format!("argument has {} eigenvalues but m = {}", x.len(), self.m));
        }
        Ok(())
    }

    /// `norm` is `max|x|` (one argument) or `max|x| max|y|` (two).
    fn check_convergence(&self, norm: f64) -> Result<()> {
        if self.terminating_degree().is_some() {
            return Ok(());
        }
        let (p, q) = (self.p(), self.q());
        if p == q + 1 && !(norm < 1.0) {
            return domain(format!("{p}F{q} converges only for ||X|| < 1 (got {norm}); the series does not terminate"));
        }
        if p > q + 1 {
            return domain(format!(
                "{p}F{q} diverges unless it terminates; no upper parameter is a nonpositive integer"
            ));
        }
        Ok(())
    }
}

/// Degree cutoff and early-stop policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTruncation {
    pub max_degree: usize,
    pub rel_tol: f64,
    pub stall_window: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        Self { max_degree: 40, rel_tol: 1e-10, stall_window: 3 }
    }
}

impl SeriesTruncation {
    pub fn new(max_degree: usize, rel_tol: f64, stall_window: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return domain(format!("rel_tol must be positive (got {rel_tol})"));
        }
        Ok(Self { max_degree, rel_tol, stall_window: stall_window.max(1) })
    }

    /// Default policy with the degree cap raised to cover an argument of
    /// total size `scale` (the terms of `etr(X)` peak near degree `tr X`).
    pub fn adaptive(scale: f64) -> Self {
        let t = scale.abs();
        let need = (t + 10.0 * t.sqrt() + 30.0).ceil() as usize;
        Self { max_degree: need.max(40), ..Self::default() }
    }

    pub fn with_max_degree(self, max_degree: usize) -> Self {
        Self { max_degree, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesResult {
    pub value: f64,
    pub degrees_used: usize,
    pub last_term_ratio: f64,
    pub converged: bool,
}

impl SeriesResult {
    fn scaled(self, c: f64) -> Self {
        Self { value: self.value * c, ..self }
    }
}

/// Per-row coefficient tables: `ln|r_i(k)|` and sign, where
/// `r_i(k) = prod_a (a - i beta/2)_k / prod_b (b - i beta/2)_k`.
struct Coefficients {
    upper: Vec<f64>,
    lower: Vec<f64>,
    hb: f64,
    ln_mag: Vec<Vec<f64>>,
    neg: Vec<Vec<bool>>,
    // first k with r_i(k) == 0
    zero_from: Vec<Option<usize>>,
}

impl Coefficients {
    fn new(spec: &HypergeomSpec) -> Self {
        Self {
            upper: spec.upper.clone(),
            lower: spec.lower.clone(),
            hb: spec.algebra.half_beta(),
            ln_mag: vec![vec![0.0]; spec.m],
            neg: vec![vec![false]; spec.m],
            zero_from: vec![None; spec.m],
        }
    }

    fn extend_to(&mut self, k: usize) {
        for i in 0..self.ln_mag.len() {
            while self.ln_mag[i].len() <= k {
                let j = (self.ln_mag[i].len() - 1) as f64;
                let shift = i as f64 * self.hb;
                let mut lm = *self.ln_mag[i].last().unwrap();
                let mut ng = *self.neg[i].last().unwrap();
                for &a in &self.upper {
                    let f = a - shift + j;
                    if f == 0.0 && self.zero_from[i].is_none() {
                        self.zero_from[i] = Some(self.ln_mag[i].len());
                    }
                    lm += f.abs().ln();
                    ng ^= f < 0.0;
                }
                for &b in &self.lower {
                    let f = b - shift + j;
                    lm -= f.abs().ln();
                    ng ^= f < 0.0;
                }
                self.ln_mag[i].push(lm);
                self.neg[i].push(ng);
            }
        }
    }

    /// `(ln|coef|, negative)`, or `None` when the coefficient vanishes.
    fn ln_coef(&self, p: &Partition) -> Option<(f64, bool)> {
        let mut lm = 0.0;
        let mut ng = false;
        for (i, &k) in p.parts().iter().enumerate() {
            let k = k as usize;
            if matches!(self.zero_from[i], Some(z) if k >= z) {
                return None;
            }
            lm += self.ln_mag[i][k];
            ng ^= self.neg[i][k];
        }
        Some((lm, ng))
    }
}

struct Accumulator {
    sum: Neumaier,
    trunc: SeriesTruncation,
    run: usize,
    prev_abs: f64,
    last_ratio: f64,
    degrees: usize,
}

impl Accumulator {
    fn new(trunc: SeriesTruncation) -> Self {
        Self { sum: Neumaier::default(), trunc, run: 0, prev_abs: 0.0, last_ratio: 0.0, degrees: 0 }
    }

    /// Adds one degree; returns true once the stall criterion is met.
    fn push(&mut self, k: usize, deg_sum: f64, deg_abs: f64) -> Result<bool> {
        self.sum.add(deg_sum);
        self.degrees = k + 1;
        if !self.sum.total().is_finite() {
            return Err(Error::Overflow(format!("series partial sum is not finite at degree {k}")));
        }
        self.last_ratio = if self.prev_abs > 0.0 { deg_abs / self.prev_abs } else { 0.0 };
        self.prev_abs = deg_abs;
        if k == 0 {
            return Ok(false);
        }
        if deg_abs <= self.trunc.rel_tol * self.sum.total().abs() {
            self.run += 1;
        } else {
            self.run = 0;
        }
        Ok(self.run >= self.trunc.stall_window)
    }

    fn finish(&self, converged: bool) -> SeriesResult {
        SeriesResult {
            value: self.sum.total(),
            degrees_used: self.degrees,
            last_term_ratio: self.last_ratio,
            converged,
        }
    }
}

fn run_series(
    spec: &HypergeomSpec,
    x: &SpectralArgument,
    y: Option<&SpectralArgument>,
    max_first_part: Option<u32>,
    trunc: SeriesTruncation,
) -> Result<SeriesResult> {
    let table = JackTable::shared(spec.algebra);
    let mut ev = table.evaluator(x);
    let mut second = y.map(|y| (table.evaluator(y), spec.m));
    let mut coefs = Coefficients::new(spec);
    let mut acc = Accumulator::new(trunc);
    let finite_bound = match (spec.terminating_degree(), max_first_part) {
        (Some(a), Some(r)) => Some(a.min(spec.m * r as usize)),
        (a, r) => a.or(r.map(|r| spec.m * r as usize)),
    };
    let last = match finite_bound {
        Some(b) => b,
        None => trunc.max_degree,
    };
    for k in 0..=last {
        ev.advance();
        if let Some((e, _)) = &mut second {
            e.advance();
        }
        coefs.extend_to(k);
        let lnk = ln_factorial(k as u32);
        let mut deg = Neumaier::default();
        let mut deg_abs = 0.0;
        for (idx, p) in ev.partitions(k).iter().enumerate() {
            if matches!(max_first_part, Some(r) if p.first_part() > r) {
                continue;
            }
            let Some((lc, neg)) = coefs.ln_coef(p) else { continue };
            let mut t = ev.values(k)[idx];
            if let Some((e, m)) = &second {
                // C(x) C(y) / (k! C(I)) = T(x) T(y) / T(I)
                let ty = e.values(k)[idx];
                t *= ty * (lnk - ln_jack_c_at_identity(p, *m, spec.algebra) + lc).exp();
            } else {
                t *= lc.exp();
            }
            if neg {
                t = -t;
            }
            deg.add(t);
            deg_abs += t.abs();
        }
        if acc.push(k, deg.total(), deg_abs)? && finite_bound.is_none() {
            return Ok(acc.finish(true));
        }
    }
    Ok(acc.finish(finite_bound.is_some()))
}

/// One-argument series `pFq(a; b; X)`.
pub fn pfq(spec: &HypergeomSpec, x: &SpectralArgument, trunc: SeriesTruncation) -> Result<SeriesResult> {
    spec.check_arg(x)?;
    spec.check_convergence(x.max_abs())?;
    run_series(spec, x, None, None, trunc)
}

/// Two-argument series `pFq(a; b; X, Y)`.
pub fn pfq_two(
    spec: &HypergeomSpec,
    x: &SpectralArgument,
    y: &SpectralArgument,
    trunc: SeriesTruncation,
) -> Result<SeriesResult> {
    spec.check_arg(x)?;
    spec.check_arg(y)?;
    spec.check_convergence(x.max_abs() * y.max_abs())?;
    run_series(spec, x, Some(y), None, trunc)
}

/// The series restricted to partitions with first part at most `max_first_part`.
/// This is a finite sum (degree at most `m * max_first_part`) and is always exact.
pub fn truncated_pfq_restricted(
    spec: &HypergeomSpec,
    x: &SpectralArgument,
    max_first_part: u32,
) -> Result<SeriesResult> {
    spec.check_arg(x)?;
    run_series(spec, x, None, Some(max_first_part), SeriesTruncation::default())
}

/// Both sides of Kummer's relation `1F1(a; c; X) = etr(X) 1F1(c - a; c; -X)`.
pub fn kummer_1f1(
    a: f64,
    c: f64,
    x: &SpectralArgument,
    algebra: DivisionAlgebra,
    trunc: SeriesTruncation,
) -> Result<(SeriesResult, SeriesResult)> {
    let m = x.len();
    let lhs = pfq(&HypergeomSpec::new(vec![a], vec![c], algebra, m)?, x, trunc)?;
    let neg = x.scaled(-1.0)?;
    let rhs = pfq(&HypergeomSpec::new(vec![c - a], vec![c], algebra, m)?, &neg, trunc)?;
    Ok((lhs, rhs.scaled(x.trace().exp())))
}

/// The three forms of `2F1(a, b; c; X)` related by Euler's and Pfaff's transformations:
/// the direct series, `|I - X|^{-b} 2F1(c - a, b; c; -X (I - X)^{-1})` and
/// `|I - X|^{c - a - b} 2F1(c - a, c - b; c; X)`.
pub fn euler_2f1(
    a: f64,
    b: f64,
    c: f64,
    x: &SpectralArgument,
    algebra: DivisionAlgebra,
    trunc: SeriesTruncation,
) -> Result<[SeriesResult; 3]> {
    let m = x.len();
    if !(x.max_abs() < 1.0) {
        return domain(format!("2F1 requires ||X|| < 1 (got {})", x.max_abs()));
    }
    let det: f64 = x.eigenvalues().iter().map(|l| 1.0 - l).product();
    let direct = pfq(&HypergeomSpec::new(vec![a, b], vec![c], algebra, m)?, x, trunc)?;
    let moved = x.map(|l| -l / (1.0 - l))?;
    if !(moved.max_abs() < 1.0) {
        return domain(format!("Pfaff side requires ||X (I - X)^-1|| < 1 (got {})", moved.max_abs()));
    }
    let pfaff = pfq(&HypergeomSpec::new(vec![c - a, b], vec![c], algebra, m)?, &moved, trunc)
        .map_err(|e| Error::Domain(format!("Pfaff side: {e}")))?;
    let euler = pfq(&HypergeomSpec::new(vec![c - a, c - b], vec![c], algebra, m)?, x, trunc)
        .map_err(|e| Error::Domain(format!("Euler side: {e}")))?;
    Ok([direct, pfaff.scaled(det.powf(-b)), euler.scaled(det.powf(c - a - b))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec_of(upper: &[f64], lower: &[f64], beta: u32, m: usize) -> HypergeomSpec {
        HypergeomSpec::new(upper.to_vec(), lower.to_vec(), DivisionAlgebra::new(beta).unwrap(), m).unwrap()
    }

    fn arg(v: &[f64]) -> SpectralArgument {
        SpectralArgument::from_slice(v).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    // Classical scalar pFq by direct term recursion.
    fn scalar_pfq(upper: &[f64], lower: &[f64], x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..500 {
            let nf = n as f64;
            let num: f64 = upper.iter().map(|a| a + nf).product();
            let den: f64 = lower.iter().map(|b| b + nf).product();
            term *= num / den * x / (nf + 1.0);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    #[test]
    fn exp_closed_form() {
        for beta in [1, 2, 4, 8] {
            let r = pfq(&spec_of(&[], &[], beta, 2), &arg(&[0.3, -0.1]), SeriesTruncation::default()).unwrap();
            assert!(r.converged);
            assert!(rel(r.value, 0.2f64.exp()) < 1e-10);
        }
    }

    #[test]
    fn exp_with_large_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for beta in [1, 2, 4, 8] {
            for m in 1..=3 {
                let x: Vec<f64> = (0..m).map(|_| rng.random_range(-5.0..5.0) / m as f64).collect();
                let x = arg(&x);
                let r = pfq(&spec_of(&[], &[], beta, m), &x, SeriesTruncation::adaptive(x.abs_sum())).unwrap();
                assert!(r.converged);
                assert!(rel(r.value, x.trace().exp()) < 1e-9, "beta={beta} m={m}");
            }
        }
    }

    #[test]
    fn binomial_closed_form() {
        let r = pfq(&spec_of(&[2.0], &[], 1, 1), &arg(&[0.5]), SeriesTruncation::new(200, 1e-14, 3).unwrap()).unwrap();
        assert!(rel(r.value, 4.0) < 1e-12);
        for beta in [1, 2, 4, 8] {
            for a in [0.5, 1.0, 2.5] {
                let x = arg(&[0.6, -0.35, 0.2]);
                let want: f64 = x.eigenvalues().iter().map(|l| (1.0 - l).powf(-a)).product();
                let trunc = SeriesTruncation::new(120, 1e-13, 3).unwrap();
                let r = pfq(&spec_of(&[a], &[], beta, 3), &x, trunc).unwrap();
                assert!(rel(r.value, want) < 1e-8, "beta={beta} a={a}: {} vs {want}", r.value);
            }
        }
    }

    #[test]
    fn domain_rules() {
        assert!(pfq(&spec_of(&[1.0, 1.0], &[2.0], 1, 1), &arg(&[1.5]), SeriesTruncation::default()).is_err());
        assert!(pfq(&spec_of(&[1.0, 1.0], &[], 1, 1), &arg(&[0.1]), SeriesTruncation::default()).is_err());
        // terminating 2F0 is fine anywhere
        let r = pfq(&spec_of(&[-2.0, 1.0], &[], 1, 1), &arg(&[3.0]), SeriesTruncation::default()).unwrap();
        assert!(r.converged);
        assert!(rel(r.value, 1.0 - 6.0 + 18.0) < 1e-14);
        assert!(HypergeomSpec::new(vec![1.0], vec![-1.0], DivisionAlgebra::REAL, 2).is_err());
        assert!(HypergeomSpec::new(vec![1.0], vec![0.5], DivisionAlgebra::REAL, 2).is_err());
        assert!(HypergeomSpec::new(vec![1.0], vec![0.5], DivisionAlgebra::REAL, 1).is_ok());
        assert!(pfq(&spec_of(&[], &[], 1, 2), &arg(&[0.1]), SeriesTruncation::default()).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let r = pfq(&spec_of(&[], &[], 1, 1), &arg(&[30.0]), SeriesTruncation::default()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.degrees_used, 41);
    }

    #[test]
    fn two_argument_reductions() {
        for beta in [1, 2, 4] {
            let s = spec_of(&[], &[], beta, 3);
            let x = arg(&[0.4, 0.1, -0.3]);
            let r = pfq_two(&s, &x, &SpectralArgument::ones(3), SeriesTruncation::default()).unwrap();
            assert!(rel(r.value, x.trace().exp()) < 1e-10);
            let r = pfq_two(&s, &x, &SpectralArgument::zeros(3), SeriesTruncation::default()).unwrap();
            assert_eq!(r.value, 1.0);
            let s = spec_of(&[0.7], &[1.9], beta, 3);
            let one = pfq(&s, &x, SeriesTruncation::default()).unwrap();
            let two = pfq_two(&s, &x, &SpectralArgument::ones(3), SeriesTruncation::default()).unwrap();
            assert!(rel(two.value, one.value) < 1e-12);
        }
        let s = spec_of(&[1.0], &[], 1, 2);
        assert!(pfq_two(&s, &arg(&[0.9, 0.1]), &arg(&[1.5, 0.2]), SeriesTruncation::default()).is_err());
        assert!(pfq_two(&s, &arg(&[0.9]), &arg(&[0.5, 0.2]), SeriesTruncation::default()).is_err());
    }

    #[test]
    fn scalar_reduction_is_beta_free() {
        let cases: [(&[f64], &[f64], f64); 4] =
            [(&[0.7], &[1.9], 2.3), (&[1.2, 0.4], &[2.5], -0.8), (&[], &[1.5], 1.7), (&[0.3, 2.0], &[1.1, 3.4], 0.9)];
        for (u, l, x) in cases {
            let want = scalar_pfq(u, l, x);
            for beta in [1, 2, 4, 8] {
                let trunc = SeriesTruncation::new(200, 1e-14, 3).unwrap();
                let r = pfq(&spec_of(u, l, beta, 1), &arg(&[x]), trunc).unwrap();
                assert!(rel(r.value, want) < 1e-10);
            }
        }
    }

    #[test]
    fn partial_sums_nondecreasing_for_positive_data() {
        let s = spec_of(&[0.8, 1.3], &[2.2], 2, 2);
        let x = arg(&[0.5, 0.2]);
        let mut last = 0.0;
        for k in 0..25 {
            let r = pfq(&s, &x, SeriesTruncation::new(k, 1e-30, 3).unwrap()).unwrap();
            assert!(r.value >= last);
            last = r.value;
        }
    }

    #[test]
    fn kummer_examples() {
        let z = SpectralArgument::zeros(2);
        let (l, r) = kummer_1f1(0.4, 1.3, &z, DivisionAlgebra::REAL, SeriesTruncation::default()).unwrap();
        assert_eq!((l.value, r.value), (1.0, 1.0));
        let (l, r) = kummer_1f1(1.0, 2.0, &arg(&[0.7]), DivisionAlgebra::REAL, SeriesTruncation::default()).unwrap();
        let want = (0.7f64.exp() - 1.0) / 0.7;
        assert!(rel(l.value, want) < 1e-10 && rel(r.value, want) < 1e-10);
        let (l, r) =
            kummer_1f1(2.0, 5.0, &arg(&[0.4, 0.1]), DivisionAlgebra::QUATERNION, SeriesTruncation::default()).unwrap();
        assert!(rel(l.value, r.value) < 1e-8);
    }

    #[test]
    fn euler_examples() {
        let t = SeriesTruncation::default();
        let vals = euler_2f1(0.5, 0.6, 1.7, &SpectralArgument::zeros(2), DivisionAlgebra::REAL, t).unwrap();
        assert!(vals.iter().all(|v| v.value == 1.0));
        let t = SeriesTruncation::new(200, 1e-14, 3).unwrap();
        let direct = pfq(&spec_of(&[1.0, 1.0], &[2.0], 1, 1), &arg(&[0.5]), t).unwrap();
        assert!(rel(direct.value, 2.0 * 2f64.ln()) < 1e-10);
        let vals = euler_2f1(1.0, 1.0, 2.0, &arg(&[0.4]), DivisionAlgebra::REAL, t).unwrap();
        for v in vals {
            assert!(rel(v.value, -(0.6f64.ln()) / 0.4) < 1e-10);
        }
        // x = 0.5 puts the Pfaff argument on the unit circle
        assert!(euler_2f1(1.0, 1.0, 2.0, &arg(&[0.5]), DivisionAlgebra::REAL, t).is_err());
        let vals =
            euler_2f1(0.7, 1.3, 2.4, &arg(&[0.3, 0.1]), DivisionAlgebra::REAL, SeriesTruncation::default()).unwrap();
        assert!(rel(vals[1].value, vals[0].value) < 1e-8);
        assert!(rel(vals[2].value, vals[0].value) < 1e-8);
        assert!(euler_2f1(1.0, 1.0, 2.0, &arg(&[0.7]), DivisionAlgebra::REAL, t).is_err());
    }

    #[test]
    fn restricted_sums() {
        let s = spec_of(&[], &[], 1, 1);
        let r = truncated_pfq_restricted(&s, &arg(&[0.9]), 0).unwrap();
        assert_eq!(r.value, 1.0);
        let t = 1.3;
        let r = truncated_pfq_restricted(&s, &arg(&[t]), 2).unwrap();
        assert!(rel(r.value, 1.0 + t + t * t / 2.0) < 1e-15);
        // {}, (1), (2), (1,1), (2,1), (2,2)
        let count: usize = (0..=4).map(|k| enumerate_partitions(k, 2, Some(2)).len()).sum();
        assert_eq!(count, 6);
        // with unit coefficients and x = e_1 only one-row partitions survive
        let s2 = spec_of(&[], &[], 2, 2);
        let r = truncated_pfq_restricted(&s2, &arg(&[1.0, 0.0]), 2).unwrap();
        assert!(rel(r.value, 2.5) < 1e-14);
        assert_eq!(r.degrees_used, 5);
    }
}
