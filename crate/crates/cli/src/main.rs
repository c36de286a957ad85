mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use jackdiv::special::{ln_mv_gamma, ln_mv_gamma_weighted, WeightSign, WeightedGammaQuery};
use jackdiv::verify::{run_suite, VerificationReport};
use jackdiv::wishart::{figure1, figure2, grid, FigureRow};
use jackdiv::{
    cdf_lambda_max, cdf_lambda_min, cdf_wishart_region, jack_c, jack_j, joint_eigen_density, pfq, pfq_two,
    sample_wishart, DivisionAlgebra, HypergeomSpec, Partition, SeriesTruncation, SpectralArgument, WishartModel,
};

const DEFAULT_SEED: u64 = 20240611;

#[derive(Parser, Debug)]
#[command(
    name = "jackdiv",
    version,
    about = "Jack polynomials, matrix-argument hypergeometric series and Wishart eigenvalue laws"
)]
#[command(args_override_self = true)]
struct Cli {
    /// File of `key = value` lines used as defaults for the flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads; affects wall time only
    #[arg(long, global = true, env = "JACKDIV_THREADS")]
    threads: Option<usize>,

    /// Write results here instead of stdout
    #[arg(long, global = true, env = "JACKDIV_OUTPUT", value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a Jack polynomial at a spectrum
    Jack(JackArgs),
    /// Evaluate pFq with one or two matrix arguments
    Pfq(PfqArgs),
    /// Multivariate gamma function, optionally weighted by a partition
    Gamma(GammaArgs),
    /// CDF of the largest Wishart eigenvalue
    CdfMax(CdfArgs),
    /// CDF of the smallest Wishart eigenvalue
    CdfMin(CdfArgs),
    /// P(S < Omega) for a Wishart matrix S
    CdfRegion(RegionArgs),
    /// Joint density of the ordered Wishart eigenvalues
    Density(DensityArgs),
    /// Monte Carlo checks of the integral identities
    Verify(VerifyArgs),
    /// CSV tables of the two Wishart eigenvalue figures
    Figures(FigureArgs),
}

#[derive(Clone, Debug)]
struct List(Vec<f64>);

fn parse_list(s: &str) -> Result<List, String> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    t.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| format!("bad number {v:?}")))
        .collect::<Result<Vec<_>, _>>()
        .map(List)
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    Partition::from_str(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug)]
struct Grid {
    start: f64,
    stop: f64,
    points: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let bad = || format!("grid must look like start:stop:points (got {s:?})");
    let f: Vec<&str> = s.split(':').collect();
    if f.len() != 3 {
        return Err(bad());
    }
    let start = f[0].trim().parse().map_err(|_| bad())?;
    let stop = f[1].trim().parse().map_err(|_| bad())?;
    let points = f[2].trim().parse().map_err(|_| bad())?;
    if points == 0 {
        return Err("a grid needs at least one point".into());
    }
    Ok(Grid { start, stop, points })
}

impl Grid {
    fn values(self) -> Vec<f64> {
        grid(self.start, self.stop, self.points)
    }
}

#[derive(Args, Debug)]
struct AlgebraArg {
    /// Real dimension of the division algebra: 1, 2, 4 or 8
    #[arg(long, env = "JACKDIV_BETA", default_value_t = 1)]
    beta: u32,
}

impl AlgebraArg {
    fn get(&self) -> Result<DivisionAlgebra, String> {
        DivisionAlgebra::new(self.beta).map_err(|e| e.to_string())
    }
}

#[derive(Args, Debug)]
struct TruncArgs {
    /// Largest series degree summed
    #[arg(long, env = "JACKDIV_MAX_DEGREE", default_value_t = 40)]
    max_degree: usize,
    /// Relative size of a degree block below which the series may stop
    #[arg(long, env = "JACKDIV_TOL")]
    tol: Option<f64>,
    /// Consecutive small blocks required before stopping
    #[arg(long, env = "JACKDIV_STALL", default_value_t = 3)]
    stall: usize,
}

impl TruncArgs {
    fn get(&self, default_tol: f64) -> Result<SeriesTruncation, String> {
        SeriesTruncation::new(self.max_degree, self.tol.unwrap_or(default_tol), self.stall).map_err(|e| e.to_string())
    }
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Matrix size; defaults to the length of --sigma
    #[arg(long, env = "JACKDIV_M")]
    m: Option<usize>,
    /// Degrees of freedom
    #[arg(long, env = "JACKDIV_N")]
    n: f64,
    /// Eigenvalues of Sigma; defaults to the identity
    #[arg(long, env = "JACKDIV_SIGMA", value_parser = parse_list)]
    sigma: Option<List>,
    #[command(flatten)]
    algebra: AlgebraArg,
}

impl ModelArgs {
    fn get(&self) -> Result<WishartModel, String> {
        let sigma = match (&self.sigma, self.m) {
            (Some(s), Some(m)) if s.0.len() != m => {
                return Err(format!("--sigma has {} eigenvalues but --m is {m}", s.0.len()));
            }
            (Some(s), _) => s.0.clone(),
            (None, Some(m)) => vec![1.0; m],
            (None, None) => return Err("give --m or --sigma".into()),
        };
        WishartModel::new(sigma.len(), self.n, sigma, self.algebra.get()?).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Normalization {
    C,
    J,
}

#[derive(Args, Debug)]
struct JackArgs {
    /// Partition, e.g. [2,1]
    #[arg(long, env = "JACKDIV_KAPPA", value_parser = parse_partition)]
    kappa: Partition,
    /// Eigenvalues of the argument
    #[arg(long, env = "JACKDIV_EIGS", value_parser = parse_list, allow_hyphen_values = true)]
    eigs: List,
    #[arg(long, env = "JACKDIV_NORM", value_enum, default_value = "c")]
    norm: Normalization,
    #[command(flatten)]
    algebra: AlgebraArg,
}

#[derive(Args, Debug)]
struct PfqArgs {
    /// Upper parameters
    #[arg(long, env = "JACKDIV_A", value_parser = parse_list, allow_hyphen_values = true, default_value = "")]
    a: List,
    /// Lower parameters
    #[arg(long, env = "JACKDIV_B", value_parser = parse_list, allow_hyphen_values = true, default_value = "")]
    b: List,
    /// Eigenvalues of X
    #[arg(long, env = "JACKDIV_EIGS", value_parser = parse_list, allow_hyphen_values = true)]
    eigs: List,
    /// Eigenvalues of Y for the two-argument series
    #[arg(long, env = "JACKDIV_EIGS2", value_parser = parse_list, allow_hyphen_values = true)]
    eigs2: Option<List>,
    #[command(flatten)]
    algebra: AlgebraArg,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Args, Debug)]
struct GammaArgs {
    #[arg(long, env = "JACKDIV_A", allow_hyphen_values = true)]
    a: f64,
    #[arg(long, env = "JACKDIV_M")]
    m: usize,
    /// Weight partition
    #[arg(long, env = "JACKDIV_KAPPA", value_parser = parse_partition)]
    kappa: Option<Partition>,
    /// Use the weight -kappa
    #[arg(long)]
    minus: bool,
    /// Print the natural logarithm
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    algebra: AlgebraArg,
}

#[derive(Args, Debug)]
struct CdfArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Points to evaluate at
    #[arg(long, env = "JACKDIV_X", value_parser = parse_list, conflicts_with = "grid")]
    x: Option<List>,
    /// start:stop:points
    #[arg(long, env = "JACKDIV_GRID", value_parser = parse_grid)]
    grid: Option<Grid>,
    #[command(flatten)]
    trunc: TruncArgs,
}

impl CdfArgs {
    fn points(&self) -> Result<Vec<f64>, String> {
        match (&self.x, self.grid) {
            (Some(x), _) => Ok(x.0.clone()),
            (None, Some(g)) => Ok(g.values()),
            (None, None) => Err("give --x or --grid".into()),
        }
    }
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Eigenvalues of Omega (Omega commutes with Sigma)
    #[arg(long, env = "JACKDIV_OMEGA", value_parser = parse_list)]
    omega: List,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Ordered eigenvalues lambda_1 >= ... >= lambda_m
    #[arg(long, env = "JACKDIV_LAMBDAS", value_parser = parse_list)]
    lambdas: List,
    #[command(flatten)]
    trunc: TruncArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Smaller sample counts
    #[arg(long)]
    quick: bool,
    #[arg(long, env = "JACKDIV_SEED")]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Figure {
    Fig1,
    Fig2,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(value_enum)]
    figure: Figure,
    /// start:stop:points
    #[arg(long, env = "JACKDIV_GRID", value_parser = parse_grid)]
    grid: Option<Grid>,
    /// Also tabulate empirical CDFs from this many Wishart draws per sampled algebra
    #[arg(long, env = "JACKDIV_SAMPLES", default_value_t = 0)]
    samples: usize,
    #[arg(long, env = "JACKDIV_SEED")]
    seed: Option<u64>,
    #[command(flatten)]
    trunc: TruncArgs,
}

fn seed_or_default(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => {
            eprintln!("seed: {s}");
            s
        }
        None => {
            eprintln!("seed: {DEFAULT_SEED} (default)");
            DEFAULT_SEED
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, String> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| format!("cannot create {}: {e}", p.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn spectral(l: &List) -> Result<SpectralArgument, String> {
    SpectralArgument::from_slice(&l.0).map_err(|e| e.to_string())
}

fn warn_unconverged(what: &str, degrees: usize) {
    eprintln!("warning: {what} did not converge within {degrees} degrees; raise --max-degree");
}

enum Failure {
    Msg(String),
    Io(io::Error),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Msg(s)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool, Failure> {
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}");
    match &cli.command {
        Command::Jack(a) => {
            let alg = a.algebra.get()?;
            let x = spectral(&a.eigs)?;
            let v = match a.norm {
                Normalization::C => jack_c(&a.kappa, &x, alg),
                Normalization::J => jack_j(&a.kappa, &x, alg),
            };
            w(out, num(v))?;
        }
        Command::Pfq(a) => {
            let alg = a.algebra.get()?;
            let x = spectral(&a.eigs)?;
            let spec = HypergeomSpec::new(a.a.0.clone(), a.b.0.clone(), alg, x.len()).map_err(|e| e.to_string())?;
            let trunc = a.trunc.get(1e-10)?;
            let r = match &a.eigs2 {
                None => pfq(&spec, &x, trunc),
                Some(y) => pfq_two(&spec, &x, &spectral(y)?, trunc),
            }
            .map_err(|e| e.to_string())?;
            if !r.converged {
                warn_unconverged("the series", r.degrees_used);
            }
            w(out, num(r.value))?;
        }
        Command::Gamma(a) => {
            let alg = a.algebra.get()?;
            let ln = match &a.kappa {
                None => ln_mv_gamma(a.m, alg, a.a),
                Some(k) => {
                    let sign = if a.minus { WeightSign::Minus } else { WeightSign::Plus };
                    ln_mv_gamma_weighted(&WeightedGammaQuery::new(a.a, a.m, alg, k.clone(), sign))
                }
            }
            .map_err(|e| e.to_string())?;
            w(out, num(if a.log { ln } else { ln.exp() }))?;
        }
        Command::CdfMax(a) => {
            let model = a.model.get()?;
            let trunc = a.trunc.get(1e-10)?;
            let mut rows = Vec::new();
            for x in a.points()? {
                let r = cdf_lambda_max(&model, x, trunc).map_err(|e| e.to_string())?;
                if !r.converged {
                    warn_unconverged(&format!("the series at x = {x}"), r.degrees_used);
                }
                rows.push(format!("{},{},{}", num(x), num(r.value), r.converged));
            }
            w(out, "x,cdf,converged".into())?;
            for r in rows {
                w(out, r)?;
            }
        }
        Command::CdfMin(a) => {
            let model = a.model.get()?;
            model.lambda_min_order().map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            for x in a.points()? {
                let v = cdf_lambda_min(&model, x).map_err(|e| e.to_string())?;
                rows.push(format!("{},{}", num(x), num(v)));
            }
            w(out, "x,cdf".into())?;
            for r in rows {
                w(out, r)?;
            }
        }
        Command::CdfRegion(a) => {
            let model = a.model.get()?;
            let r = cdf_wishart_region(&model, &a.omega.0, a.trunc.get(1e-10)?).map_err(|e| e.to_string())?;
            if !r.converged {
                warn_unconverged("the series", r.degrees_used);
            }
            w(out, num(r.value))?;
        }
        Command::Density(a) => {
            let model = a.model.get()?;
            let v = joint_eigen_density(&model, &a.lambdas.0, a.trunc.get(1e-10)?).map_err(|e| e.to_string())?;
            w(out, num(v))?;
        }
        Command::Verify(a) => {
            let Suite::All = a.suite;
            let seed = seed_or_default(a.seed);
            let reports = run_suite(seed, a.quick).map_err(|e| e.to_string())?;
            w(out, VerificationReport::HEADER.into())?;
            for r in &reports {
                w(out, r.line())?;
            }
            let passed = reports.iter().filter(|r| r.pass).count();
            eprintln!("{passed}/{} checks pass", reports.len());
            return Ok(passed == reports.len());
        }
        Command::Figures(a) => figures(a, out)?,
    }
    Ok(true)
}

fn figures(a: &FigureArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (n, largest, default_grid) = match a.figure {
        Figure::Fig1 => (4.0, true, Grid { start: 0.0, stop: 30.0, points: 121 }),
        Figure::Fig2 => (7.0, false, Grid { start: 0.0, stop: 20.0, points: 101 }),
    };
    let g = a.grid.unwrap_or(default_grid).values();
    // near F = 1 the default tolerance leaves ~1e-11 wiggles; keep the curves monotone
    let rows: Vec<FigureRow> = match a.figure {
        Figure::Fig1 => figure1(&g, a.trunc.get(1e-14)?),
        Figure::Fig2 => figure2(&g),
    }
    .map_err(|e| e.to_string())?;
    let mut header = String::from("x,beta1,beta2,beta4,beta8");
    let mut empirical: Vec<Vec<f64>> = Vec::new();
    if a.samples > 0 {
        let seed = seed_or_default(a.seed);
        for (j, beta) in [1u32, 2, 4].into_iter().enumerate() {
            let model = WishartModel::new(2, n, vec![1.0, 2.0], DivisionAlgebra::new(beta).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let draws = sample_wishart(&model, seed.wrapping_add(j as u64), a.samples).map_err(|e| e.to_string())?;
            let mut v: Vec<f64> = draws
                .iter()
                .map(|s| if largest { s.eigenvalues[0] } else { s.eigenvalues[s.eigenvalues.len() - 1] })
                .collect();
            v.sort_by(f64::total_cmp);
            empirical.push(v);
            header.push_str(&format!(",empirical_beta{beta}"));
        }
    }
    writeln!(out, "{header}")?;
    for r in &rows {
        let mut line = num(r.x);
        for c in r.cdf {
            line.push(',');
            line.push_str(&num(c));
        }
        for v in &empirical {
            let f = v.partition_point(|s| *s <= r.x) as f64 / v.len() as f64;
            line.push(',');
            line.push_str(&num(f));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    if let Some(path) = config::config_path(&args) {
        match config::read(Path::new(&path), &Cli::command()) {
            Ok(pairs) => {
                for (k, v) in pairs {
                    if std::env::var_os(&k).is_none() {
                        std::env::set_var(k, v);
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse_from(args);
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = open_output(cli.output.as_deref()).map_err(Failure::Msg).and_then(|mut out| {
        let ok = run(&cli, out.as_mut())?;
        out.flush()?;
        Ok(ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Msg(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn list_and_grid_parsing() {
        assert_eq!(parse_list("1, 2.5,-3").unwrap().0, vec![1.0, 2.5, -3.0]);
        assert_eq!(parse_list("[0.5]").unwrap().0, vec![0.5]);
        assert!(parse_list("").unwrap().0.is_empty());
        assert!(parse_list("1,x").is_err());
        let g = parse_grid("0:30:121").unwrap();
        assert_eq!((g.start, g.stop, g.points), (0.0, 30.0, 121));
        assert!(parse_grid("0:30").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn config_keys_map_to_env_names() {
        assert_eq!(config::env_name("max-degree"), "JACKDIV_MAX_DEGREE");
        assert_eq!(config::env_name(" beta "), "JACKDIV_BETA");
    }
}
