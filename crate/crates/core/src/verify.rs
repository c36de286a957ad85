//! Monte Carlo checks of integral identities for Jack polynomials and
//! hypergeometric functions of matrix argument.
//!
//! Cone integrals are importance sampled from matrix-gamma and matrix-beta
//! laws built by the Bartlett construction, so the exponential and
//! determinant parts of each integrand cancel against the proposal and only
//! the polynomial factor is random. Group integrals average over Haar draws.
//!
//! Every check returns a [`VerificationReport`]; results depend only on the
//! parameters, the seed and the sample count.

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use sha2::{Digest, Sha256};

use crate::algebra::DivisionAlgebra;
use crate::error::{domain, Error, Result};
use crate::hypergeom::{pfq, pfq_two, truncated_pfq_restricted, HypergeomSpec, SeriesTruncation};
use crate::jack::{jack_c, jack_c_at_identity, SpectralArgument};
use crate::linalg::{Field, Mat, Quaternion};
use crate::mc::{chunk_rng, mc_mean, RunningStats};
use crate::partition::Partition;
use crate::quad::integrate_half_line;
use crate::special::{ln_gamma, ln_mv_beta, ln_mv_gamma, ln_mv_gamma_weighted, WeightSign, WeightedGammaQuery};

/// Pass criteria: `|z| <= z_max` and `rel <= rel_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub z_max: f64,
    pub rel_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { z_max: 3.0, rel_max: 0.05 }
    }
}

/// Sample count, seed and pass criteria shared by every check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McOptions {
    pub n_samples: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
}

impl McOptions {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self { n_samples, seed, thresholds: Thresholds::default() }
    }

    pub fn with_thresholds(self, thresholds: Thresholds) -> Self {
        Self { thresholds, ..self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub identity_id: String,
    /// Canonical `key=value;...` rendering of every input, seed and sample count included.
    pub params: String,
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub z_score: f64,
    pub rel_error: f64,
    pub thresholds: Thresholds,
    pub pass: bool,
}

impl VerificationReport {
    fn new(identity_id: &str, params: String, analytic: f64, stats: &RunningStats, thresholds: Thresholds) -> Self {
        let estimate = stats.mean();
        let std_error = stats.std_error();
        let diff = estimate - analytic;
        // Exact proposals give zero variance; judge those against rounding instead.
        let z_score = diff / std_error.max(1e-12 * analytic.abs());
        let rel_error = if analytic == 0.0 { diff.abs() } else { (diff / analytic).abs() };
        let pass = z_score.abs() <= thresholds.z_max && rel_error <= thresholds.rel_max;
        Self {
            identity_id: identity_id.to_string(),
            params,
            analytic,
            estimate,
            std_error,
            n_samples: stats.count() as usize,
            z_score,
            rel_error,
            thresholds,
            pass,
        }
    }

    /// First 16 hex digits of the SHA-256 of [`params`](Self::params).
    pub fn param_digest(&self) -> String {
        let digest = Sha256::digest(self.params.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// `identity_id,param_digest,analytic,estimate,std_error,z,rel,pass`
    pub fn line(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.identity_id,
            self.param_digest(),
            self.analytic,
            self.estimate,
            self.std_error,
            self.z_score,
            self.rel_error,
            self.pass
        )
    }

    pub const HEADER: &'static str = "identity_id,param_digest,analytic,estimate,std_error,z,rel,pass";
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

struct Params(String);

impl Params {
    fn new(algebra: DivisionAlgebra, m: usize) -> Self {
        Self(format!("beta={};m={m}", algebra.beta()))
    }

    fn num(mut self, key: &str, v: f64) -> Self {
        let _ = write!(self.0, ";{key}={v:e}");
        self
    }

    fn list(mut self, key: &str, v: &[f64]) -> Self {
        let _ = write!(self.0, ";{key}=[");
        for (i, x) in v.iter().enumerate() {
            let _ = write!(self.0, "{}{x:e}", if i > 0 { "," } else { "" });
        }
        self.0.push(']');
        self
    }

    fn text(mut self, key: &str, v: impl fmt::Display) -> Self {
        let _ = write!(self.0, ";{key}={v}");
        self
    }

    fn finish(mut self, opts: &McOptions) -> String {
        let _ = write!(self.0, ";n={};seed={}", opts.n_samples, opts.seed);
        self.0
    }
}

// ---------------------------------------------------------------------------
// Samplers

/// One Monte Carlo integrand, generic over the matrix entry type.
trait Kernel: Sync {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64>;
}

fn run<K: Kernel>(algebra: DivisionAlgebra, opts: &McOptions, k: &K) -> Result<RunningStats> {
    algebra.require_sampling()?;
    if opts.n_samples < 2 {
        return domain("Monte Carlo checks need at least 2 samples");
    }
    match algebra.beta() {
        1 => mc_mean(opts.n_samples, opts.seed, |r| k.eval::<f64>(r)),
        2 => mc_mean(opts.n_samples, opts.seed, |r| k.eval::<Complex64>(r)),
        _ => mc_mean(opts.n_samples, opts.seed, |r| k.eval::<Quaternion>(r)),
    }
}

fn gamma_draw<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0).expect("gamma shape checked by caller").sample(rng)
}

/// Upper-triangular `T` with `T^* T ~ Gamma_m(a, I)`, i.e. density
/// `etr(-Y) |Y|^{a-(m-1)beta/2-1} / Gamma_m[a]`.
fn bartlett<T: Field, R: Rng + ?Sized>(m: usize, a: f64, rng: &mut R) -> Mat<T> {
    let hb = T::BETA as f64 / 2.0;
    let mut t = Mat::<T>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = T::from_real(gamma_draw(a - i as f64 * hb, rng).sqrt());
        for j in i + 1..m {
            t[(i, j)] = T::gaussian(rng, std::f64::consts::FRAC_1_SQRT_2);
        }
    }
    t
}

fn ln_det_tri<T: Field>(t: &Mat<T>) -> f64 {
    (0..t.rows).map(|i| 2.0 * t[(i, i)].re().ln()).sum()
}

/// `eig(F diag(d) F^*)`, which is the spectrum of `(F^*F) diag(d)`.
fn spec_gram_diag<T: Field>(f: &Mat<T>, d: &[f64]) -> Result<SpectralArgument> {
    SpectralArgument::new(f.scale_cols(d).matmul(&f.adjoint()).hermitian_eigenvalues())
}

/// `F` with `F^*F` distributed as matrix beta type I `(a, b)`, and `ln|F^*F|`.
fn beta1_factor<T: Field, R: Rng + ?Sized>(m: usize, a: f64, b: f64, rng: &mut R) -> Result<(Mat<T>, f64)> {
    let ta = bartlett::<T, _>(m, a, rng);
    let tb = bartlett::<T, _>(m, b, rng);
    let s = ta.gram().add(&tb.gram());
    let t = s.cholesky_upper().ok_or_else(|| Error::Domain("singular matrix-beta draw".into()))?;
    let ln_det = ln_det_tri(&ta) - ln_det_tri(&t);
    Ok((ta.matmul(&t.upper_inverse()), ln_det))
}

/// Haar-distributed `n x n` unitary (first `cols` columns only when `cols < n`).
fn haar<T: Field, R: Rng + ?Sized>(n: usize, cols: usize, rng: &mut R) -> Mat<T> {
    let mut g = Mat::<T>::gaussian(n, cols, 1.0, rng);
    g.orthonormalize_columns();
    g
}

/// A Haar-distributed element of `U^beta(m)`.
#[derive(Clone, Debug, PartialEq)]
pub enum HaarMatrix {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
    Quaternion(Mat<Quaternion>),
}

impl HaarMatrix {
    pub fn size(&self) -> usize {
        match self {
            HaarMatrix::Real(h) => h.rows,
            HaarMatrix::Complex(h) => h.rows,
            HaarMatrix::Quaternion(h) => h.rows,
        }
    }

    /// `max |H^*H - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            HaarMatrix::Real(h) => h.unitarity_defect(),
            HaarMatrix::Complex(h) => h.unitarity_defect(),
            HaarMatrix::Quaternion(h) => h.unitarity_defect(),
        }
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> f64 {
        match self {
            HaarMatrix::Real(h) => h.trace_re(),
            HaarMatrix::Complex(h) => h.trace_re(),
            HaarMatrix::Quaternion(h) => h.trace_re(),
        }
    }
}

/// One Haar draw of size `m`, reproducible from `seed`.
pub fn haar_sample(m: usize, algebra: DivisionAlgebra, seed: u64) -> Result<HaarMatrix> {
    algebra.require_sampling()?;
    if m == 0 {
        return domain("Haar matrices need m >= 1");
    }
    let mut rng = chunk_rng(seed, 0);
    Ok(match algebra.beta() {
        1 => HaarMatrix::Real(haar(m, m, &mut rng)),
        2 => HaarMatrix::Complex(haar(m, m, &mut rng)),
        _ => HaarMatrix::Quaternion(haar(m, m, &mut rng)),
    })
}

// ---------------------------------------------------------------------------
// Argument checks

fn dims(lists: &[(&str, &[f64])]) -> Result<usize> {
    let m = lists[0].1.len();
    if m == 0 {
        return domain(format!("{} must be non-empty", lists[0].0));
    }
    for (name, v) in lists {
        if v.len() != m {
            return domain(format!("{name} has {} entries, expected m = {m}", v.len()));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return domain(format!("{name} has a non-finite entry {x}"));
        }
    }
    Ok(m)
}

fn positive(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().find(|x| !(**x > 0.0)) {
        Some(x) => domain(format!("{name} must be positive definite (eigenvalue {x})")),
        None => Ok(()),
    }
}

fn fits(kappa: &Partition, m: usize) -> Result<()> {
    if kappa.len() > m {
        return domain(format!("partition {kappa} has more than m = {m} parts"));
    }
    Ok(())
}

fn last_part(kappa: &Partition, m: usize) -> f64 {
    kappa.part(m - 1) as f64
}

fn ln_gamma_w(a: f64, m: usize, algebra: DivisionAlgebra, kappa: &Partition, sign: WeightSign) -> Result<f64> {
    ln_mv_gamma_weighted(&WeightedGammaQuery::new(a, m, algebra, kappa.clone(), sign))
}

fn above(name: &str, v: f64, bound: f64, cond: &str) -> Result<()> {
    if v > bound {
        Ok(())
    } else {
        domain(format!("requires {name} > {cond} = {bound} (got {name} = {v})"))
    }
}

fn ln_abs_det(d: &[f64]) -> f64 {
    d.iter().map(|v| v.abs().ln()).sum()
}

fn ratio(u: &[f64], z: &[f64]) -> Vec<f64> {
    u.iter().zip(z).map(|(u, z)| u / z).collect()
}

fn product(u: &[f64], z: &[f64]) -> Vec<f64> {
    u.iter().zip(z).map(|(u, z)| u * z).collect()
}

fn jc(kappa: &Partition, x: &SpectralArgument, algebra: DivisionAlgebra) -> f64 {
    if kappa.is_empty() {
        1.0
    } else {
        jack_c(kappa, x, algebra)
    }
}

// ---------------------------------------------------------------------------
// Group integrals

struct Split<'a> {
    kappa: &'a Partition,
    x: &'a [f64],
    sqrt_y: Vec<f64>,
    algebra: DivisionAlgebra,
}

impl Kernel for Split<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let m = self.x.len();
        let f = haar::<T, _>(m, m, rng).scale_rows(&self.sqrt_y);
        Ok(jc(self.kappa, &spec_gram_diag(&f, self.x)?, self.algebra))
    }
}

/// `int C_k(X H^* Y H) dH = C_k(X) C_k(Y) / C_k(I)`.
pub fn verify_split_integral(
    kappa: &Partition,
    x: &[f64],
    y: &[f64],
    algebra: DivisionAlgebra,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("x", x), ("y", y)])?;
    fits(kappa, m)?;
    // The spectrum of X H^* Y H is real when either factor is semidefinite.
    let (x, y) = if y.iter().all(|v| *v >= 0.0) {
        (x, y)
    } else if x.iter().all(|v| *v >= 0.0) {
        (y, x)
    } else {
        return domain("splitting integral needs x or y positive semidefinite");
    };
    let ex = SpectralArgument::from_slice(x)?;
    let ey = SpectralArgument::from_slice(y)?;
    let analytic = jc(kappa, &ex, algebra) * jc(kappa, &ey, algebra) / jack_c_at_identity(kappa, m, algebra);
    let k = Split { kappa, x, sqrt_y: y.iter().map(|v| v.sqrt()).collect(), algebra };
    let stats = run(algebra, opts, &k)?;
    let params = Params::new(algebra, m).text("kappa", kappa).list("x", x).list("y", y).finish(opts);
    Ok(VerificationReport::new("split_integral", params, analytic, &stats, opts.thresholds))
}

struct TwoMatrix<'a> {
    x: &'a [f64],
    y: &'a [f64],
}

impl Kernel for TwoMatrix<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let m = self.x.len();
        let h = haar::<T, _>(m, m, rng);
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += self.x[i] * self.y[j] * h[(i, j)].norm_sqr();
            }
        }
        Ok(s.exp())
    }
}

/// `int etr(X H Y H^*) dH = 0F0(X, Y)`.
pub fn verify_two_matrix_0f0(
    x: &[f64],
    y: &[f64],
    algebra: DivisionAlgebra,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("x", x), ("y", y)])?;
    let spec = HypergeomSpec::new(vec![], vec![], algebra, m)?;
    let sx = SpectralArgument::from_slice(x)?;
    let sy = SpectralArgument::from_slice(y)?;
    let trunc = SeriesTruncation::adaptive(sx.max_abs() * sy.abs_sum());
    let analytic = pfq_two(&spec, &sx, &sy, trunc)?.value;
    let stats = run(algebra, opts, &TwoMatrix { x, y })?;
    let params = Params::new(algebra, m).list("x", x).list("y", y).finish(opts);
    Ok(VerificationReport::new("two_matrix_0f0", params, analytic, &stats, opts.thresholds))
}

struct Stiefel<'a> {
    s: &'a [f64],
    n: usize,
    beta: f64,
}

impl Kernel for Stiefel<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let m = self.s.len();
        let h1 = haar::<T, _>(self.n, m, rng);
        let tr: f64 = (0..m).map(|i| self.s[i] * h1[(i, i)].re()).sum();
        Ok((self.beta * tr).exp())
    }
}

/// `int etr(beta X H_1) dH = 0F1(beta n/2; beta^2 X X^* / 4)` for the `m x n`
/// matrix `X = [diag(s) | 0]`, `H_1` the first `m` columns of a Haar draw in
/// `U^beta(n)`. `etr` takes the real part of the trace.
pub fn verify_stiefel_0f1(
    s: &[f64],
    n: usize,
    algebra: DivisionAlgebra,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("s", s)])?;
    if algebra.beta() > 2 {
        return Err(Error::Unsupported(format!("the Stiefel check covers beta = 1, 2 (got beta = {algebra})")));
    }
    if n < m {
        return domain(format!("the Stiefel check needs n >= m (got n = {n}, m = {m})"));
    }
    let beta = algebra.beta_f64();
    let arg = SpectralArgument::new(s.iter().map(|v| beta * beta * v * v / 4.0).collect())?;
    let spec = HypergeomSpec::new(vec![], vec![beta * n as f64 / 2.0], algebra, m)?;
    let analytic = pfq(&spec, &arg, SeriesTruncation::adaptive(arg.trace().sqrt()))?.value;
    let stats = run(algebra, opts, &Stiefel { s, n, beta })?;
    let params = Params::new(algebra, m).list("s", s).num("n", n as f64).finish(opts);
    Ok(VerificationReport::new("stiefel_0f1", params, analytic, &stats, opts.thresholds))
}

// ---------------------------------------------------------------------------
// Cone integrals

struct LaplaceJack<'a> {
    kappa: &'a Partition,
    a: f64,
    a0: f64,
    d: Vec<f64>,
    ln_const: f64,
    algebra: DivisionAlgebra,
}

impl Kernel for LaplaceJack<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let t = bartlett::<T, _>(self.d.len(), self.a0, rng);
        // |X| = |T|^2 / |Z|; |Z| is folded into ln_const
        let w = (self.ln_const + (self.a - self.a0) * ln_det_tri(&t)).exp();
        Ok(w * jc(self.kappa, &spec_gram_diag(&t, &self.d)?, self.algebra))
    }
}

/// `int_{X>0} etr(-XZ) |X|^{a-p} C_k(XR) dX = Gamma_m[a, k] |Z|^{-a} C_k(R Z^{-1})`,
/// `p = (m-1)beta/2 + 1`, valid for `a > (m-1)beta/2 - k_m`.
pub fn verify_laplace_jack(
    a: f64,
    kappa: &Partition,
    r: &[f64],
    z: &[f64],
    algebra: DivisionAlgebra,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("r", r), ("z", z)])?;
    fits(kappa, m)?;
    positive("Z", z)?;
    let base = (m - 1) as f64 * algebra.half_beta();
    let km = last_part(kappa, m);
    above("a", a, base - km, "(m-1)beta/2 - k_m")?;
    let d = ratio(r, z);
    let analytic = (ln_gamma_w(a, m, algebra, kappa, WeightSign::Plus)? - a * ln_abs_det(z)).exp()
        * jc(kappa, &SpectralArgument::from_slice(&d)?, algebra);
    let a0 = a + km;
    let ln_const = ln_mv_gamma(m, algebra, a0)? - a * ln_abs_det(z);
    let k = LaplaceJack { kappa, a, a0, d, ln_const, algebra };
    let stats = run(algebra, opts, &k)?;
    let params = Params::new(algebra, m).num("a", a).text("kappa", kappa).list("r", r).list("z", z).finish(opts);
    Ok(VerificationReport::new("laplace_jack", params, analytic, &stats, opts.thresholds))
}

struct BetaJack<'a> {
    kappa: &'a Partition,
    a: f64,
    a0: f64,
    b: f64,
    r: &'a [f64],
    inverse: bool,
    ln_const: f64,
    algebra: DivisionAlgebra,
}

impl Kernel for BetaJack<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let (f, ln_det) = beta1_factor::<T, _>(self.r.len(), self.a0, self.b, rng)?;
        let spec = if self.inverse {
            // U^{-1} = F^{-1} F^{-*} = G^* G with G = F^{-*}
            let g = f.upper_inverse().adjoint();
            spec_gram_diag(&g, self.r)?
        } else {
            spec_gram_diag(&f, self.r)?
        };
        Ok((self.ln_const + (self.a - self.a0) * ln_det).exp() * jc(self.kappa, &spec, self.algebra))
    }
}

/// `int_{0<U<I} |U|^{a-p} |I-U|^{b-p} C_k(UR) dU = Gamma_m[a,k] Gamma_m[b] / Gamma_m[a+b,k] C_k(R)`
/// for `a > (m-1)beta/2 - k_m`; with `inverse_arg`, `C_k(U^{-1}R)` and `-k` throughout,
/// for `a > (m-1)beta/2 + k_1`. Both need `b > (m-1)beta/2`.
pub fn verify_beta_jack(
    a: f64,
    b: f64,
    kappa: &Partition,
    r: &[f64],
    algebra: DivisionAlgebra,
    inverse_arg: bool,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("r", r)])?;
    fits(kappa, m)?;
    let base = (m - 1) as f64 * algebra.half_beta();
    above("b", b, base, "(m-1)beta/2")?;
    let (sign, a0) = if inverse_arg {
        above("a", a, base + kappa.first_part() as f64, "(m-1)beta/2 + k_1")?;
        (WeightSign::Minus, a - kappa.first_part() as f64)
    } else {
        let km = last_part(kappa, m);
        above("a", a, base - km, "(m-1)beta/2 - k_m")?;
        (WeightSign::Plus, a + km)
    };
    let ln_rhs = ln_gamma_w(a, m, algebra, kappa, sign)? + ln_mv_gamma(m, algebra, b)?
        - ln_gamma_w(a + b, m, algebra, kappa, sign)?;
    let analytic = ln_rhs.exp() * jc(kappa, &SpectralArgument::from_slice(r)?, algebra);
    let k = BetaJack { kappa, a, a0, b, r, inverse: inverse_arg, ln_const: ln_mv_beta(m, algebra, a0, b)?, algebra };
    let stats = run(algebra, opts, &k)?;
    let params = Params::new(algebra, m)
        .num("a", a)
        .num("b", b)
        .text("kappa", kappa)
        .list("r", r)
        .text("inverse", inverse_arg)
        .finish(opts);
    let id = if inverse_arg { "beta_jack_inverse" } else { "beta_jack" };
    Ok(VerificationReport::new(id, params, analytic, &stats, opts.thresholds))
}

/// Which side of the type-II beta identity: `r1` weights with `C_k(R X^{-1})`, `r2` with `C_k(R X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaTwoVariant {
    R1,
    R2,
}

impl fmt::Display for BetaTwoVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaTwoVariant::R1 => "r1",
            BetaTwoVariant::R2 => "r2",
        })
    }
}

struct BetaTwo<'a> {
    kappa: &'a Partition,
    a: f64,
    a0: f64,
    b0: f64,
    r: &'a [f64],
    variant: BetaTwoVariant,
    ln_const: f64,
    algebra: DivisionAlgebra,
}

impl Kernel for BetaTwo<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let m = self.r.len();
        let ta = bartlett::<T, _>(m, self.a0, rng);
        let tb = bartlett::<T, _>(m, self.b0, rng);
        // X = T_B^{-1} A T_B^{-*} is type-II beta (a0, b0) when B = T_B^* T_B.
        let ln_det = ln_det_tri(&ta) - ln_det_tri(&tb);
        let spec = match self.variant {
            BetaTwoVariant::R2 => spec_gram_diag(&ta.matmul(&tb.upper_inverse().adjoint()), self.r)?,
            // X^{-1} = T_B^* A^{-1} T_B = G^* G with G = T_A^{-*} T_B
            BetaTwoVariant::R1 => spec_gram_diag(&ta.upper_inverse().adjoint().matmul(&tb), self.r)?,
        };
        Ok((self.ln_const + (self.a - self.a0) * ln_det).exp() * jc(self.kappa, &spec, self.algebra))
    }
}

/// `int_{X>0} |X|^{a-p} |I+X|^{-(a+b)} C_k(R X^{-1}) dX = Gamma_m[a,-k] Gamma_m[b,k] / Gamma_m[a+b] C_k(R)` (`r1`)
/// and the mirrored `C_k(RX)` form with `Gamma_m[a,k] Gamma_m[b,-k]` (`r2`).
pub fn verify_theorem2(
    a: f64,
    b: f64,
    kappa: &Partition,
    r: &[f64],
    algebra: DivisionAlgebra,
    variant: BetaTwoVariant,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("r", r)])?;
    fits(kappa, m)?;
    let base = (m - 1) as f64 * algebra.half_beta();
    let k1 = kappa.first_part() as f64;
    let km = last_part(kappa, m);
    let (sa, sb, a0, b0) = match variant {
        BetaTwoVariant::R1 => {
            above("a", a, base + k1, "(m-1)beta/2 + k_1")?;
            above("b", b, base - km, "(m-1)beta/2 - k_m")?;
            (WeightSign::Minus, WeightSign::Plus, a - k1, b + k1)
        }
        BetaTwoVariant::R2 => {
            above("a", a, base - km, "(m-1)beta/2 - k_m")?;
            above("b", b, base + k1, "(m-1)beta/2 + k_1")?;
            (WeightSign::Plus, WeightSign::Minus, a + km, b - km)
        }
    };
    let ln_rhs =
        ln_gamma_w(a, m, algebra, kappa, sa)? + ln_gamma_w(b, m, algebra, kappa, sb)? - ln_mv_gamma(m, algebra, a + b)?;
    let analytic = ln_rhs.exp() * jc(kappa, &SpectralArgument::from_slice(r)?, algebra);
    let k = BetaTwo { kappa, a, a0, b0, r, variant, ln_const: ln_mv_beta(m, algebra, a0, b0)?, algebra };
    let stats = run(algebra, opts, &k)?;
    let params = Params::new(algebra, m)
        .num("a", a)
        .num("b", b)
        .text("kappa", kappa)
        .list("r", r)
        .text("variant", variant)
        .finish(opts);
    Ok(VerificationReport::new(&format!("theorem2_{variant}"), params, analytic, &stats, opts.thresholds))
}

/// Scalar kernels `f` for the trace-function integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarKernel {
    /// `exp(-y)`
    Exp,
    /// `exp(-y) y^j`
    ExpPower(f64),
    /// `(1 + 2y/eta)^{-beta(am + eta)}`
    Pareto(f64),
}

impl fmt::Display for ScalarKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarKernel::Exp => f.write_str("exp"),
            ScalarKernel::ExpPower(j) => write!(f, "exp_power({j:e})"),
            ScalarKernel::Pareto(eta) => write!(f, "pareto({eta:e})"),
        }
    }
}

/// `f` bound to the shape constants it depends on.
#[derive(Clone, Copy, Debug)]
struct BoundKernel {
    kind: ScalarKernel,
    // beta(am + eta) for Pareto
    power: f64,
}

impl BoundKernel {
    fn new(kind: ScalarKernel, a: f64, m: usize, algebra: DivisionAlgebra) -> Result<Self> {
        let power = match kind {
            ScalarKernel::Pareto(eta) => {
                if !(eta > 0.0) {
                    return domain(format!("the Pareto kernel needs eta > 0 (got {eta})"));
                }
                algebra.beta_f64() * (a * m as f64 + eta)
            }
            _ => 0.0,
        };
        Ok(Self { kind, power })
    }

    fn ln_f(&self, y: f64) -> f64 {
        match self.kind {
            ScalarKernel::Exp => -y,
            ScalarKernel::ExpPower(j) => -y + j * y.ln(),
            ScalarKernel::Pareto(eta) => -self.power * (2.0 * y / eta).ln_1p(),
        }
    }

    /// Fails unless `int_0^inf f(y) y^{e-1} dy` converges.
    fn check_moment(&self, e: f64) -> Result<()> {
        let ok = match self.kind {
            ScalarKernel::Exp => e > 0.0,
            ScalarKernel::ExpPower(j) => e + j > 0.0,
            ScalarKernel::Pareto(_) => e > 0.0 && e < self.power,
        };
        if ok {
            Ok(())
        } else {
            domain(format!("the scalar moment int f(y) y^(e-1) dy of {} diverges at e = {e}", self.kind))
        }
    }

    /// The scalar moment by quadrature.
    fn moment(&self, e: f64) -> Result<f64> {
        self.check_moment(e)?;
        let scale = match self.kind {
            ScalarKernel::ExpPower(j) => (e + j).max(0.5),
            ScalarKernel::Exp => e.max(0.5),
            ScalarKernel::Pareto(eta) => eta * e.max(0.5),
        };
        Ok(integrate_half_line(|y| (self.ln_f(y) + (e - 1.0) * y.ln()).exp(), scale, 0.0, 1e-11)?.value)
    }

    /// Draw `s` from the density proportional to `f(s) s^{e-1}`; returns `(s, ln q(s))`.
    fn draw<R: Rng + ?Sized>(&self, e: f64, rng: &mut R) -> (f64, f64) {
        match self.kind {
            ScalarKernel::Exp | ScalarKernel::ExpPower(_) => {
                let shape = match self.kind {
                    ScalarKernel::ExpPower(j) => e + j,
                    _ => e,
                };
                let s = gamma_draw(shape, rng);
                (s, (shape - 1.0) * s.ln() - s - ln_gamma(shape))
            }
            ScalarKernel::Pareto(eta) => {
                let g1 = gamma_draw(e, rng);
                let g2 = gamma_draw(self.power - e, rng);
                let w = g1 / g2;
                let ln_b = ln_gamma(e) + ln_gamma(self.power - e) - ln_gamma(self.power);
                let ln_q = (e - 1.0) * w.ln() - self.power * w.ln_1p() - ln_b - (eta / 2.0).ln();
                (eta / 2.0 * w, ln_q)
            }
        }
    }
}

struct TraceKernel<'a> {
    f: BoundKernel,
    e: f64,
    kappa: &'a Partition,
    a: f64,
    a0: f64,
    d: Vec<f64>,
    inverse: bool,
    ln_const: f64,
    algebra: DivisionAlgebra,
}

impl Kernel for TraceKernel<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let m = self.d.len() as f64;
        let t = bartlett::<T, _>(self.d.len(), self.a0, rng);
        let tr = t.gram().trace_re();
        let (s, ln_q) = self.f.draw(self.e, rng);
        // Y' = (s / tr Y) Y has tr Y' = s and the same direction as Y.
        let c = s / tr;
        let ln_det = ln_det_tri(&t) + m * c.ln();
        let spec = if self.inverse {
            spec_gram_diag(&t.upper_inverse().adjoint(), &self.d)?.scaled(1.0 / c)?
        } else {
            spec_gram_diag(&t, &self.d)?.scaled(c)?
        };
        let ln_w = self.ln_const + self.f.ln_f(s) + (self.a - self.a0) * ln_det + (m * self.a0 - 1.0) * s.ln() - ln_q;
        Ok(ln_w.exp() * jc(self.kappa, &spec, self.algebra))
    }
}

/// `int_{X>0} f(tr XZ) |X|^{a-p} C_k(XU) dX = Gamma_m[a,k] / Gamma(am+k) |Z|^{-a} C_k(U Z^{-1}) theta`
/// with `theta = int f(z) z^{am+k-1} dz`, for `a > (m-1)beta/2 - k_m`; with `inverse_arg`,
/// `C_k(X^{-1}U)`, `-k` and `C_k(UZ)`, for `a > (m-1)beta/2 + k_1`. The scalar moment comes
/// from quadrature.
#[allow(clippy::too_many_arguments)]
pub fn verify_theorem1(
    f: ScalarKernel,
    a: f64,
    kappa: &Partition,
    u: &[f64],
    z: &[f64],
    algebra: DivisionAlgebra,
    inverse_arg: bool,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("u", u), ("z", z)])?;
    fits(kappa, m)?;
    positive("Z", z)?;
    let mf = m as f64;
    let base = (m - 1) as f64 * algebra.half_beta();
    let k = kappa.weight() as f64;
    let bound = BoundKernel::new(f, a, m, algebra)?;
    let (sign, e, a0, d) = if inverse_arg {
        above("a", a, base + kappa.first_part() as f64, "(m-1)beta/2 + k_1")?;
        (WeightSign::Minus, mf * a - k, a - kappa.first_part() as f64, product(u, z))
    } else {
        let km = last_part(kappa, m);
        above("a", a, base - km, "(m-1)beta/2 - k_m")?;
        (WeightSign::Plus, mf * a + k, a + km, ratio(u, z))
    };
    let moment = bound.moment(e)?;
    let analytic = (ln_gamma_w(a, m, algebra, kappa, sign)? - ln_gamma(e) - a * ln_abs_det(z)).exp()
        * jc(kappa, &SpectralArgument::from_slice(&d)?, algebra)
        * moment;
    let ln_const = ln_mv_gamma(m, algebra, a0)? - ln_gamma(mf * a0) - a * ln_abs_det(z);
    let kern = TraceKernel { f: bound, e, kappa, a, a0, d, inverse: inverse_arg, ln_const, algebra };
    let stats = run(algebra, opts, &kern)?;
    let params = Params::new(algebra, m)
        .text("f", f)
        .num("a", a)
        .text("kappa", kappa)
        .list("u", u)
        .list("z", z)
        .text("inverse", inverse_arg)
        .finish(opts);
    let id = if inverse_arg { "theorem1_inverse" } else { "theorem1" };
    Ok(VerificationReport::new(id, params, analytic, &stats, opts.thresholds))
}

/// Incomplete gamma and beta integrals over matrix intervals.
#[derive(Clone, Debug, PartialEq)]
pub enum Incomplete {
    /// `int_{0<X<Omega} etr(-Lambda X) |X|^{a-p} dX`
    LowerGamma { a: f64, lambda: Vec<f64>, omega: Vec<f64> },
    /// `int_{X>Omega} etr(-Lambda X) |X|^{a-p} dX`, `a - p` a positive integer
    UpperGamma { a: f64, lambda: Vec<f64>, omega: Vec<f64> },
    /// `int_{0<Y<Xi} |Y|^{a-p} |I-Y|^{b-p} dY`
    Beta { a: f64, b: f64, xi: Vec<f64> },
}

struct LowerGamma {
    a: f64,
    p: f64,
    w: Vec<f64>,
    ln_const: f64,
}

impl Kernel for LowerGamma {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let (f, _) = beta1_factor::<T, _>(self.w.len(), self.a, self.p, rng)?;
        let tr = f.scale_cols(&self.w).matmul(&f.adjoint()).trace_re();
        Ok((self.ln_const - tr).exp())
    }
}

struct UpperGamma {
    p: f64,
    r: f64,
    w: Vec<f64>,
    ln_const: f64,
}

impl Kernel for UpperGamma {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let t = bartlett::<T, _>(self.w.len(), self.p, rng);
        let inv_w: Vec<f64> = self.w.iter().map(|w| 1.0 / w).collect();
        let ln_det: f64 = spec_gram_diag(&t, &inv_w)?.eigenvalues().iter().map(|v| v.ln_1p()).sum();
        Ok((self.ln_const + self.r * ln_det).exp())
    }
}

struct IncBeta {
    a: f64,
    p: f64,
    xi: Vec<f64>,
    power: f64,
    ln_const: f64,
}

impl Kernel for IncBeta {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let (f, _) = beta1_factor::<T, _>(self.xi.len(), self.a, self.p, rng)?;
        let ln_det: f64 = spec_gram_diag(&f, &self.xi)?.eigenvalues().iter().map(|v| (-v).ln_1p()).sum();
        Ok((self.ln_const + self.power * ln_det).exp())
    }
}

/// Lower incomplete gamma against `B_m[a, p] |Omega|^a 1F1(a; a+p; -Omega Lambda)`,
/// upper incomplete gamma against the finite sum
/// `Gamma_m[a] |Lambda|^{-a} etr(-Lambda Omega) sum* C_k(Omega Lambda) / k!`,
/// incomplete beta against `B_m[a, p] |Xi|^a 2F1(a, p - b; a + p; Xi)`; `p = (m-1)beta/2 + 1`.
pub fn verify_incomplete(
    problem: &Incomplete,
    algebra: DivisionAlgebra,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let hb = algebra.half_beta();
    match problem {
        Incomplete::LowerGamma { a, lambda, omega } => {
            let a = *a;
            let m = dims(&[("lambda", lambda), ("omega", omega)])?;
            positive("Omega", omega)?;
            positive("Lambda", lambda)?;
            let base = (m - 1) as f64 * hb;
            above("a", a, base, "(m-1)beta/2")?;
            let p = base + 1.0;
            let w = product(omega, lambda);
            // Kummer: 1F1(a; a+p; -W) = etr(-W) 1F1(p; a+p; W), whose terms are positive.
            let arg = SpectralArgument::from_slice(&w)?;
            let spec = HypergeomSpec::new(vec![p], vec![a + p], algebra, m)?;
            let series = pfq(&spec, &arg, SeriesTruncation::adaptive(arg.trace()))?.value;
            let ln_const = ln_mv_beta(m, algebra, a, p)? + a * ln_abs_det(omega);
            let analytic = (ln_const - arg.trace() + series.ln()).exp();
            let stats = run(algebra, opts, &LowerGamma { a, p, w, ln_const })?;
            let params = Params::new(algebra, m).num("a", a).list("lambda", lambda).list("omega", omega).finish(opts);
            Ok(VerificationReport::new("incomplete_gamma", params, analytic, &stats, opts.thresholds))
        }
        Incomplete::UpperGamma { a, lambda, omega } => {
            let a = *a;
            let m = dims(&[("lambda", lambda), ("omega", omega)])?;
            positive("Omega", omega)?;
            positive("Lambda", lambda)?;
            let p = (m - 1) as f64 * hb + 1.0;
            let r = a - p;
            if (r - r.round()).abs() > 1e-9 || r.round() < 1.0 {
                return domain(format!(
                    "the upper incomplete gamma needs r = a-(m-1)beta/2-1 a positive integer (got r = {r})"
                ));
            }
            let w = product(omega, lambda);
            let tr_w: f64 = w.iter().sum();
            let spec = HypergeomSpec::new(vec![], vec![], algebra, m)?;
            let sum = truncated_pfq_restricted(&spec, &SpectralArgument::from_slice(&w)?, r.round() as u32)?.value;
            let analytic = (ln_mv_gamma(m, algebra, a)? - a * ln_abs_det(lambda) - tr_w).exp() * sum;
            let ln_const = a * ln_abs_det(omega) - tr_w + ln_mv_gamma(m, algebra, p)? - p * ln_abs_det(&w);
            let stats = run(algebra, opts, &UpperGamma { p, r: r.round(), w, ln_const })?;
            let params = Params::new(algebra, m).num("a", a).list("lambda", lambda).list("omega", omega).finish(opts);
            Ok(VerificationReport::new("incomplete_gamma_upper", params, analytic, &stats, opts.thresholds))
        }
        Incomplete::Beta { a, b, xi } => {
            let (a, b) = (*a, *b);
            let m = dims(&[("xi", xi)])?;
            if let Some(x) = xi.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                return domain(format!("incomplete beta needs 0 < Xi < I (eigenvalue {x})"));
            }
            let base = (m - 1) as f64 * hb;
            above("a", a, base, "(m-1)beta/2")?;
            above("b", b, base, "(m-1)beta/2")?;
            let p = base + 1.0;
            let spec = HypergeomSpec::new(vec![a, p - b], vec![a + p], algebra, m)?;
            let series =
                pfq(&spec, &SpectralArgument::from_slice(xi)?, SeriesTruncation::default().with_max_degree(200))?;
            if !series.converged {
                return domain("the 2F1 series did not converge; move Xi away from I");
            }
            let ln_const = ln_mv_beta(m, algebra, a, p)? + a * ln_abs_det(xi);
            let analytic = ln_const.exp() * series.value;
            let stats = run(algebra, opts, &IncBeta { a, p, xi: xi.clone(), power: b - p, ln_const })?;
            let params = Params::new(algebra, m).num("a", a).num("b", b).list("xi", xi).finish(opts);
            Ok(VerificationReport::new("incomplete_beta", params, analytic, &stats, opts.thresholds))
        }
    }
}

struct EulerIntegral<'a> {
    spec: &'a HypergeomSpec,
    x: &'a [f64],
    a: f64,
    b: f64,
    trunc: SeriesTruncation,
}

impl Kernel for EulerIntegral<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let (f, _) = beta1_factor::<T, _>(self.x.len(), self.a, self.b, rng)?;
        Ok(pfq(self.spec, &spec_gram_diag(&f, self.x)?, self.trunc)?.value)
    }
}

/// `B_m[a, c-a]^{-1} int_{0<Y<I} |Y|^{a-p} |I-Y|^{c-a-p} pFq(XY) dY = p+1Fq+1(..., a; ..., c; X)`,
/// `p = (m-1)beta/2 + 1`, for `a > (m-1)beta/2` and `c - a > (m-1)beta/2`. A `0F0`
/// integrand gives the `1F1` representation, a `1F0` integrand the `2F1` one.
pub fn verify_euler_integral(
    spec: &HypergeomSpec,
    a: f64,
    c: f64,
    x: &[f64],
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("x", x)])?;
    let algebra = spec.algebra;
    if spec.m != m {
        return domain(format!("series was built for m = {} but the argument has m = {m}", spec.m));
    }
    let base = (m - 1) as f64 * algebra.half_beta();
    above("a", a, base, "(m-1)beta/2")?;
    above("c - a", c - a, base, "(m-1)beta/2")?;
    let mut upper = spec.upper.to_vec();
    upper.push(a);
    let mut lower = spec.lower.to_vec();
    lower.push(c);
    let rhs = HypergeomSpec::new(upper, lower, algebra, m)?;
    let arg = SpectralArgument::from_slice(x)?;
    let series = pfq(&rhs, &arg, SeriesTruncation::default().with_max_degree(150))?;
    if !series.converged {
        return domain("the right-hand series did not converge within 150 degrees");
    }
    let kern = EulerIntegral { spec, x, a, b: c - a, trunc: SeriesTruncation::adaptive(arg.abs_sum()) };
    let stats = run(algebra, opts, &kern)?;
    let params = Params::new(algebra, m)
        .list("upper", &spec.upper)
        .list("lower", &spec.lower)
        .num("a", a)
        .num("c", c)
        .list("x", x)
        .finish(opts);
    Ok(VerificationReport::new("euler_integral", params, series.value, &stats, opts.thresholds))
}

struct LaplaceHyper<'a> {
    spec: &'a HypergeomSpec,
    y: Option<SpectralArgument>,
    a: f64,
    a0: f64,
    d: Vec<f64>,
    inverse: bool,
    ln_const: f64,
    trunc: SeriesTruncation,
}

impl Kernel for LaplaceHyper<'_> {
    fn eval<T: Field>(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        let t = bartlett::<T, _>(self.d.len(), self.a0, rng);
        let g = if self.inverse { t.upper_inverse().adjoint() } else { t.clone() };
        let arg = spec_gram_diag(&g, &self.d)?;
        let f = match &self.y {
            None => pfq(self.spec, &arg, self.trunc)?,
            Some(y) => pfq_two(self.spec, &arg, y, self.trunc)?,
        };
        Ok((self.ln_const + (self.a - self.a0) * ln_det_tri(&t)).exp() * f.value)
    }
}

/// `int_{X>0} etr(-XZ) |X|^{a-p} pFq(XU) dX = Gamma_m[a] |Z|^{-a} p+1Fq(..., a; UZ^{-1})`,
/// optionally with a second argument `Y` in both series.
///
/// With `inverse_arg` the integrand is `pFq(X^{-1}U)` and the right side
/// `pFq+1(...; ..., p - a; -UZ)`. Term-by-term integration is valid only for a
/// terminating integrand series, with `a > (m-1)beta/2 + N` where `N` is the
/// smallest `-a_i` over nonpositive integer upper parameters; anything else
/// is rejected.
#[allow(clippy::too_many_arguments)]
pub fn verify_laplace_hypergeom(
    spec: &HypergeomSpec,
    a: f64,
    u: &[f64],
    z: &[f64],
    y: Option<&[f64]>,
    inverse_arg: bool,
    opts: &McOptions,
) -> Result<VerificationReport> {
    let m = dims(&[("u", u), ("z", z)])?;
    positive("Z", z)?;
    let algebra = spec.algebra;
    if spec.m != m {
        return domain(format!("series was built for m = {} but the arguments have m = {m}", spec.m));
    }
    if spec.p() > spec.q() {
        return domain(format!("the integrand series needs p <= q (got p = {}, q = {})", spec.p(), spec.q()));
    }
    let ys = match y {
        Some(y) => {
            dims(&[("u", u), ("y", y)])?;
            Some(SpectralArgument::from_slice(y)?)
        }
        None => None,
    };
    let base = (m - 1) as f64 * algebra.half_beta();
    let p = base + 1.0;
    let (rhs_spec, rhs_arg, a0) = if inverse_arg {
        let n = spec.upper.iter().filter(|v| **v <= 0.0 && v.fract() == 0.0).map(|v| -v).fold(f64::INFINITY, f64::min);
        if !n.is_finite() {
            return Err(Error::Unsupported(
                "the inverse-argument transform needs a terminating integrand series \
                 (an upper parameter that is a nonpositive integer)"
                    .into(),
            ));
        }
        above("a", a, base + n, "(m-1)beta/2 + N")?;
        let mut lower = spec.lower.to_vec();
        lower.push(p - a);
        let rhs = HypergeomSpec::new(spec.upper.to_vec(), lower, algebra, m)?;
        (rhs, product(u, z).iter().map(|v| -v).collect::<Vec<_>>(), a - n)
    } else {
        above("a", a, base, "(m-1)beta/2")?;
        let mut upper = spec.upper.to_vec();
        upper.push(a);
        let rhs = HypergeomSpec::new(upper, spec.lower.to_vec(), algebra, m)?;
        (rhs, ratio(u, z), a)
    };
    let rhs_arg = SpectralArgument::new(rhs_arg)?;
    let rhs_trunc = SeriesTruncation::default().with_max_degree(150);
    let series = match &ys {
        None => pfq(&rhs_spec, &rhs_arg, rhs_trunc)?,
        Some(y) => pfq_two(&rhs_spec, &rhs_arg, y, rhs_trunc)?,
    };
    if !series.converged {
        return domain("the transformed series did not converge within 150 degrees");
    }
    let analytic = (ln_mv_gamma(m, algebra, a)? - a * ln_abs_det(z)).exp() * series.value;
    let d = if inverse_arg { product(u, z) } else { ratio(u, z) };
    let ln_const = ln_mv_gamma(m, algebra, a0)? - a * ln_abs_det(z);
    let scale = ys.as_ref().map_or(1.0, |y| y.max_abs().max(1.0)) * d.iter().map(|v| v.abs()).sum::<f64>();
    let kern = LaplaceHyper {
        spec,
        y: ys,
        a,
        a0,
        d,
        inverse: inverse_arg,
        ln_const,
        trunc: SeriesTruncation::adaptive(8.0 * scale + 20.0),
    };
    let stats = run(algebra, opts, &kern)?;
    let mut params = Params::new(algebra, m)
        .list("upper", &spec.upper)
        .list("lower", &spec.lower)
        .num("a", a)
        .list("u", u)
        .list("z", z)
        .text("inverse", inverse_arg);
    if let Some(y) = y {
        params = params.list("y", y);
    }
    let id = match (y.is_some(), inverse_arg) {
        (false, false) => "laplace_pfq",
        (false, true) => "laplace_pfq_inverse",
        (true, false) => "laplace_pfq_two",
        (true, true) => "laplace_pfq_two_inverse",
    };
    Ok(VerificationReport::new(id, params.finish(opts), analytic, &stats, opts.thresholds))
}

// ---------------------------------------------------------------------------
// Suite

fn part(p: &[u32]) -> Partition {
    Partition::new(p.to_vec()).expect("suite partitions are valid")
}

/// The default identity suite behind `verify all`. Each check gets its own
/// seed derived from `seed` and its position.
pub fn run_suite(seed: u64, quick: bool) -> Result<Vec<VerificationReport>> {
    let (r, c) = (DivisionAlgebra::REAL, DivisionAlgebra::COMPLEX);
    let q = DivisionAlgebra::QUATERNION;
    let big = if quick { 200_000 } else { 1_000_000 };
    let mid = if quick { 50_000 } else { 100_000 };
    let series = if quick { 100_000 } else { 400_000 };
    let mut idx = 0u64;
    let mut o = |n: usize| {
        idx += 1;
        McOptions::new(n, seed.wrapping_add(idx.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    };
    let mut out = Vec::new();
    for alg in [r, c, q] {
        out.push(verify_split_integral(&part(&[2, 1]), &[1.0, 2.0], &[3.0, 1.0], alg, &o(mid))?);
        out.push(verify_split_integral(&part(&[2]), &[1.0, 0.5, 0.2], &[0.3, 1.0, 2.0], alg, &o(mid))?);
        out.push(verify_two_matrix_0f0(&[0.5, 0.2], &[0.3, 0.1], alg, &o(mid))?);
    }
    out.push(verify_stiefel_0f1(&[0.7, 0.3], 4, r, &o(mid))?);
    out.push(verify_stiefel_0f1(&[0.7, 0.3], 4, c, &o(mid))?);
    out.push(verify_laplace_jack(1.2, &part(&[2]), &[1.0, 0.5], &[1.0, 1.0], r, &o(big))?);
    out.push(verify_laplace_jack(0.3, &part(&[2, 1]), &[1.0, 0.5], &[1.5, 0.8], r, &o(big))?);
    out.push(verify_laplace_jack(1.4, &part(&[2, 1]), &[0.7, 0.4], &[1.0, 2.0], c, &o(big))?);
    out.push(verify_beta_jack(2.0, 3.0, &part(&[1, 1]), &[1.0, 0.6], c, false, &o(big))?);
    out.push(verify_beta_jack(2.5, 2.0, &part(&[2]), &[1.0, 0.6], r, false, &o(big))?);
    out.push(verify_beta_jack(4.0, 2.0, &part(&[1]), &[1.0, 0.6], r, true, &o(big))?);
    out.push(verify_theorem2(2.0, 8.0, &part(&[2]), &[1.0, 0.5], c, BetaTwoVariant::R2, &o(big))?);
    out.push(verify_theorem2(4.0, 3.0, &part(&[1]), &[1.0, 0.5], r, BetaTwoVariant::R1, &o(big))?);
    out.push(verify_theorem1(ScalarKernel::Exp, 2.0, &part(&[1]), &[1.0, 0.5], &[1.0, 2.0], r, false, &o(big))?);
    out.push(verify_theorem1(
        ScalarKernel::ExpPower(1.0),
        2.0,
        &part(&[2]),
        &[1.0, 0.5],
        &[1.0, 2.0],
        r,
        false,
        &o(big),
    )?);
    out.push(verify_theorem1(ScalarKernel::Pareto(3.0), 2.5, &part(&[1]), &[1.0, 0.5], &[1.0, 1.5], r, true, &o(big))?);
    out.push(verify_incomplete(
        &Incomplete::LowerGamma { a: 2.0, lambda: vec![1.0, 0.5], omega: vec![1.0, 2.0] },
        r,
        &o(mid),
    )?);
    out.push(verify_incomplete(
        &Incomplete::UpperGamma { a: 3.5, lambda: vec![1.0, 0.5], omega: vec![0.5, 1.0] },
        r,
        &o(mid),
    )?);
    out.push(verify_incomplete(&Incomplete::Beta { a: 2.0, b: 2.5, xi: vec![0.6, 0.3] }, r, &o(mid))?);
    let f11 = HypergeomSpec::new(vec![1.5], vec![2.5], r, 2)?;
    out.push(verify_laplace_hypergeom(&f11, 2.0, &[0.3, 0.2], &[1.0, 1.5], None, false, &o(series))?);
    let f01 = HypergeomSpec::new(vec![], vec![2.0], c, 2)?;
    out.push(verify_laplace_hypergeom(&f01, 2.0, &[0.5, 0.2], &[1.0, 1.5], Some(&[0.8, 0.4]), false, &o(series))?);
    let f1t = HypergeomSpec::new(vec![-2.0], vec![1.5], r, 2)?;
    out.push(verify_laplace_hypergeom(&f1t, 4.2, &[0.5, 0.2], &[1.0, 1.5], None, true, &o(series))?);
    let f00 = HypergeomSpec::new(vec![], vec![], r, 2)?;
    out.push(verify_euler_integral(&f00, 1.5, 4.0, &[1.0, -0.5], &o(mid))?);
    let f10 = HypergeomSpec::new(vec![0.7], vec![], c, 2)?;
    out.push(verify_euler_integral(&f10, 2.0, 4.5, &[0.6, 0.3], &o(mid))?);
    let f00q = HypergeomSpec::new(vec![], vec![], q, 2)?;
    out.push(verify_euler_integral(&f00q, 2.5, 6.0, &[0.8, 0.4], &o(mid))?);
    Ok(out)
}
