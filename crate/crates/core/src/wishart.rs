//! Central Wishart matrices `S = X^* X` and the distributions of their eigenvalues.
//!
//! Gaussian entries follow the density proportional to
//! `etr(-(beta/2) Sigma^{-1} X^* X)`, i.e. variance `1/beta` per real
//! component. Most libraries use variance one; rescale by `beta` to compare.
//!
//! `Sigma` enters only through its eigenvalues, which is valid because every
//! quantity here is invariant under `S -> H S H^*`.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::DivisionAlgebra;
use crate::error::{domain, Error, Result};
use crate::hypergeom::{pfq, pfq_two, truncated_pfq_restricted, HypergeomSpec, SeriesResult, SeriesTruncation};
use crate::jack::SpectralArgument;
use crate::linalg::{Field, Mat, Quaternion};
use crate::mc::map_chunks;
use crate::special::ln_mv_gamma;

#[derive(Clone, Debug, PartialEq)]
pub struct WishartModel {
    m: usize,
    n: f64,
    sigma_eigs: Vec<f64>,
    algebra: DivisionAlgebra,
}

impl WishartModel {
    /// `W_m(n, Sigma)` with `Sigma = diag(sigma_eigs)`. Requires `n > m - 1`,
    /// the range where the normalizing `Gamma_m[beta n / 2]` exists.
    pub fn new(m: usize, n: f64, sigma_eigs: Vec<f64>, algebra: DivisionAlgebra) -> Result<Self> {
        if m == 0 {
            return domain("a Wishart model needs m >= 1");
        }
        if sigma_eigs.len() != m {
            return domain(format!("Sigma needs {m} eigenvalues (got {})", sigma_eigs.len()));
        }
        if let Some(s) = sigma_eigs.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return domain(format!("Sigma must be positive definite (eigenvalue {s})"));
        }
        if !(n > (m - 1) as f64) || !n.is_finite() {
            return domain(format!("degrees of freedom require n > m - 1 = {} (got n = {n})", m - 1));
        }
        Ok(Self { m, n, sigma_eigs, algebra })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn sigma_eigs(&self) -> &[f64] {
        &self.sigma_eigs
    }

    pub fn algebra(&self) -> DivisionAlgebra {
        self.algebra
    }

    /// `n >= (m - 1) beta`, the range stated for the Wishart density.
    pub fn meets_density_bound(&self) -> bool {
        self.n >= (self.m - 1) as f64 * self.algebra.beta_f64()
    }

    fn hb(&self) -> f64 {
        self.algebra.half_beta()
    }

    /// `((m-1) beta/2 + 1, (n+m-1) beta/2 + 1)`.
    fn cdf_params(&self) -> (f64, f64) {
        let mm = (self.m - 1) as f64;
        (mm * self.hb() + 1.0, (self.n + mm) * self.hb() + 1.0)
    }

    fn ln_cdf_const(&self) -> Result<f64> {
        let (p, c) = self.cdf_params();
        let b = self.hb();
        Ok(ln_mv_gamma(self.m, self.algebra, p)?
            - ln_mv_gamma(self.m, self.algebra, c)?
            - b * self.m as f64 * self.n * (1.0 / b).ln())
    }

    /// `r = (n - m + 1) beta/2 - 1` when it is a positive integer.
    pub fn lambda_min_order(&self) -> Result<u32> {
        let r = (self.n - self.m as f64 + 1.0) * self.hb() - 1.0;
        let ri = r.round();
        if (r - ri).abs() > 1e-9 || ri < 1.0 {
            return Err(Error::Unsupported(format!(
                "the lambda_min distribution requires r=(n-m+1)beta/2-1 a positive integer (got r = {r})"
            )));
        }
        Ok(ri as u32)
    }
}

fn raised(trunc: SeriesTruncation, scale: f64) -> SeriesTruncation {
    let need = SeriesTruncation::adaptive(scale).max_degree;
    trunc.with_max_degree(trunc.max_degree.max(need))
}

/// `P(S < Omega)` given the spectrum `theta` of `Omega Sigma^{-1}`.
///
/// Evaluated in the Kummer-transformed form
/// `const |theta|^{beta n/2} etr(-beta theta/2) 1F1((m-1)beta/2+1; (n+m-1)beta/2+1; beta theta/2)`
/// whose series has positive terms.
pub fn cdf_region_spectrum(model: &WishartModel, theta: &[f64], trunc: SeriesTruncation) -> Result<SeriesResult> {
    if theta.len() != model.m {
        return domain(format!("expected {} eigenvalues of Omega Sigma^-1 (got {})", model.m, theta.len()));
    }
    if let Some(t) = theta.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return domain(format!("Omega must be positive definite (eigenvalue ratio {t})"));
    }
    if theta.contains(&0.0) {
        return Ok(SeriesResult { value: 0.0, degrees_used: 0, last_term_ratio: 0.0, converged: true });
    }
    let b = model.hb();
    let (p, c) = model.cdf_params();
    let arg = SpectralArgument::new(theta.iter().map(|t| b * t).collect())?;
    let spec = HypergeomSpec::new(vec![p], vec![c], model.algebra, model.m)?;
    let series = pfq(&spec, &arg, raised(trunc, arg.trace()))?;
    let ln_pref = model.ln_cdf_const()? + b * model.n * theta.iter().map(|t| t.ln()).sum::<f64>() - arg.trace();
    Ok(SeriesResult { value: (ln_pref + series.value.ln()).exp(), ..series })
}

/// `P(S < Omega)` for `Omega = diag(omega_eigs)` in the eigenbasis of `Sigma`.
pub fn cdf_wishart_region(model: &WishartModel, omega_eigs: &[f64], trunc: SeriesTruncation) -> Result<SeriesResult> {
    if omega_eigs.len() != model.m {
        return domain(format!("Omega needs {} eigenvalues (got {})", model.m, omega_eigs.len()));
    }
    let theta: Vec<f64> = omega_eigs.iter().zip(&model.sigma_eigs).map(|(w, s)| w / s).collect();
    cdf_region_spectrum(model, &theta, trunc)
}

/// `P(lambda_max < x)`.
pub fn cdf_lambda_max(model: &WishartModel, x: f64, trunc: SeriesTruncation) -> Result<SeriesResult> {
    if !(x >= 0.0) {
        return domain(format!("lambda_max CDF needs x >= 0 (got {x})"));
    }
    let theta: Vec<f64> = model.sigma_eigs.iter().map(|s| x / s).collect();
    cdf_region_spectrum(model, &theta, trunc)
}

/// `P(lambda_max < x)` from the untransformed series
/// `const x^{beta m n/2} |Sigma|^{-beta n/2} 1F1(beta n/2; (n+m-1)beta/2+1; -beta x Sigma^{-1}/2)`.
/// Alternating; only trustworthy for small `beta x / sigma`.
pub fn cdf_lambda_max_raw(model: &WishartModel, x: f64, trunc: SeriesTruncation) -> Result<SeriesResult> {
    if !(x > 0.0) {
        return domain(format!("lambda_max CDF needs x > 0 (got {x})"));
    }
    let b = model.hb();
    let (_, c) = model.cdf_params();
    let arg = SpectralArgument::new(model.sigma_eigs.iter().map(|s| -b * x / s).collect())?;
    let spec = HypergeomSpec::new(vec![b * model.n], vec![c], model.algebra, model.m)?;
    let series = pfq(&spec, &arg, raised(trunc, arg.abs_sum()))?;
    let ln_theta: f64 = model.sigma_eigs.iter().map(|s| (x / s).ln()).sum();
    let pref = (model.ln_cdf_const()? + b * model.n * ln_theta).exp();
    Ok(SeriesResult { value: pref * series.value, ..series })
}

/// `P(lambda_min < y) = 1 - etr(-W) sum* C_k(W) / k!` with `W = beta y Sigma^{-1} / 2`,
/// the sum running over partitions with first part at most `r`. Exact finite sum.
pub fn cdf_lambda_min(model: &WishartModel, y: f64) -> Result<f64> {
    let r = model.lambda_min_order()?;
    if !(y >= 0.0) {
        return domain(format!("lambda_min CDF needs y >= 0 (got {y})"));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let w = SpectralArgument::new(model.sigma_eigs.iter().map(|s| model.hb() * y / s).collect())?;
    let spec = HypergeomSpec::new(vec![], vec![], model.algebra, model.m)?;
    let sum = truncated_pfq_restricted(&spec, &w, r)?;
    Ok(1.0 - (sum.value.ln() - w.trace()).exp())
}

/// `pi` exponent of the spectral decomposition Jacobian, as tabulated per algebra.
fn varrho(algebra: DivisionAlgebra, m: usize) -> f64 {
    let m = m as f64;
    match algebra.beta() {
        1 => 0.0,
        2 => -m,
        4 => -2.0 * m,
        _ => -4.0 * m,
    }
}

/// Joint density of the ordered eigenvalues `lambda_1 >= ... >= lambda_m > 0` of `S`.
pub fn joint_eigen_density(model: &WishartModel, lambdas: &[f64], trunc: SeriesTruncation) -> Result<f64> {
    let m = model.m;
    if lambdas.len() != m {
        return domain(format!("expected {m} eigenvalues (got {})", lambdas.len()));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return domain(format!("eigenvalues must be positive (got {l})"));
    }
    if lambdas.windows(2).any(|w| w[0] < w[1]) {
        return domain("eigenvalues must be sorted in decreasing order");
    }
    if lambdas.windows(2).any(|w| w[0] == w[1]) {
        return Ok(0.0);
    }
    let (beta, b) = (model.algebra.beta_f64(), model.hb());
    let mf = m as f64;
    let mut ln = (mf * mf * b + varrho(model.algebra, m)) * std::f64::consts::PI.ln()
        - b * mf * model.n * (1.0 / b).ln()
        - ln_mv_gamma(m, model.algebra, b * model.n)?
        - ln_mv_gamma(m, model.algebra, b * mf)?
        - b * model.n * model.sigma_eigs.iter().map(|s| s.ln()).sum::<f64>();
    let power = b * (model.n - mf + 1.0) - 1.0;
    for (i, &li) in lambdas.iter().enumerate() {
        ln += power * li.ln();
        for &lj in &lambdas[i + 1..] {
            ln += beta * (li - lj).ln();
        }
    }
    // 0F0(X, L) with X = -beta Sigma^{-1}/2; shifting X by cI multiplies by e^{c tr L},
    // and shifting to X >= 0 makes every term positive.
    let x: Vec<f64> = model.sigma_eigs.iter().map(|s| -b / s).collect();
    let shift = x.iter().copied().fold(f64::INFINITY, f64::min);
    let xs = SpectralArgument::new(x.iter().map(|v| v - shift).collect())?;
    let l = SpectralArgument::from_slice(lambdas)?;
    ln += shift * l.trace();
    if xs.max_abs() > 0.0 {
        let spec = HypergeomSpec::new(vec![], vec![], model.algebra, m)?;
        let f = pfq_two(&spec, &xs, &l, raised(trunc, xs.max_abs() * l.trace()))?;
        ln += f.value.ln();
    }
    Ok(ln.exp())
}

/// Eigenvalues of one Wishart draw, decreasing. `tied` flags exactly equal neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSample {
    pub eigenvalues: Vec<f64>,
    pub tied: bool,
}

fn draw<T: Field, R: Rng + ?Sized>(m: usize, n: usize, sqrt_sigma: &[f64], rng: &mut R) -> Vec<f64> {
    let sd = 1.0 / (T::BETA as f64).sqrt();
    let x = Mat::<T>::gaussian(n, m, sd, rng).scale_cols(sqrt_sigma);
    x.gram().hermitian_eigenvalues()
}

/// Eigenvalues of a Hermitian matrix as a spectral argument.
pub fn spectral_argument_of<T: Field>(a: &Mat<T>) -> Result<SpectralArgument> {
    if a.rows != a.cols {
        return domain(format!("expected a square matrix (got {}x{})", a.rows, a.cols));
    }
    SpectralArgument::new(a.hermitian_eigenvalues())
}

/// `count` independent eigenvalue draws. Deterministic in `(seed, count)`.
pub fn sample_wishart(model: &WishartModel, seed: u64, count: usize) -> Result<Vec<EigenSample>> {
    model.algebra.require_sampling()?;
    let n = model.n.round();
    if (model.n - n).abs() > 1e-12 || n < model.m as f64 {
        return domain(format!("sampling needs an integer n >= m = {} (got {})", model.m, model.n));
    }
    let n = n as usize;
    let m = model.m;
    let sq: Vec<f64> = model.sigma_eigs.iter().map(|s| s.sqrt()).collect();
    let beta = model.algebra.beta();
    let chunks = map_chunks(count, seed, |rng, len| {
        Ok((0..len)
            .map(|_| {
                let eigenvalues = match beta {
                    1 => draw::<f64, _>(m, n, &sq, rng),
                    2 => draw::<Complex64, _>(m, n, &sq, rng),
                    _ => draw::<Quaternion, _>(m, n, &sq, rng),
                };
                let tied = eigenvalues.windows(2).any(|w| w[0] == w[1]);
                EigenSample { eigenvalues, tied }
            })
            .collect::<Vec<_>>())
    })?;
    Ok(chunks.into_iter().flatten().collect())
}

/// `points` equally spaced values from `start` to `stop` inclusive.
pub fn grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        _ => (0..points).map(|i| start + (stop - start) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// One row of a figure table: the abscissa and the CDF for `beta = 1, 2, 4, 8`.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub x: f64,
    pub cdf: [f64; 4],
}

fn figure(grid: &[f64], n: f64, eval: impl Fn(&WishartModel, f64) -> Result<f64>) -> Result<Vec<FigureRow>> {
    let models =
        DivisionAlgebra::ALL.iter().map(|&a| WishartModel::new(2, n, vec![1.0, 2.0], a)).collect::<Result<Vec<_>>>()?;
    grid.iter()
        .map(|&x| {
            let mut cdf = [0.0; 4];
            for (c, model) in cdf.iter_mut().zip(&models) {
                *c = eval(model, x)?;
            }
            Ok(FigureRow { x, cdf })
        })
        .collect()
}

/// `lambda_max` CDFs of `W_2(4, diag(1, 2))` for each algebra.
pub fn figure1(grid: &[f64], trunc: SeriesTruncation) -> Result<Vec<FigureRow>> {
    figure(grid, 4.0, |model, x| {
        let r = cdf_lambda_max(model, x, trunc)?;
        if !r.converged {
            return Err(Error::Domain(format!(
                "lambda_max series for beta={} at x={x} did not converge within {} degrees",
                model.algebra, r.degrees_used
            )));
        }
        Ok(r.value)
    })
}

/// `lambda_min` CDFs of `W_2(7, diag(1, 2))` for each algebra.
pub fn figure2(grid: &[f64]) -> Result<Vec<FigureRow>> {
    figure(grid, 7.0, cdf_lambda_min)
}
