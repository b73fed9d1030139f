//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or numerical
//! failure, 2 on a configuration error (bad flag, unparsable number,
//! invalid parameters).

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{casimir_matrix, casimir_value, verify_relations, StructureConstants};
use crate::coupling::{kappa_triple, overlap_table, roots_for_coupling, CoupledSpace, CouplingSpec, FockBlock, Num, Pair};
use crate::error::Error;
use crate::irreps::{build_realization, params_from_roots, Form, IrrepSpec};
use crate::matrix::Matrix;
use crate::racah::{difference_eigenfunction, racah_hypergeometric, racah_recurrence_eval, realize_difference_algebra, RacahParams};
use crate::report::{IdentityReport, Residual};
use crate::scalar::{parse_scalar, Backend, Rational, Scalar};
use crate::superint::{build_symmetries, energy_spectrum, s_commutation, verify_symmetry_algebra_with, ModelParams, Perturbation};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub const BACKEND_ENV: &str = "RACAH_KIT_BACKEND";

#[derive(Debug, Parser)]
#[command(name = "racah-kit", version, about = "Racah-Wilson algebra checks, Racah coefficient tables and Racah polynomials")]
pub struct Cli {
    /// key=value file supplying defaults for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// exact | float
    #[arg(long, global = true, env = BACKEND_ENV)]
    pub backend: Option<String>,
    /// relative tolerance for the float backend
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// json | csv
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// write here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite: algebra, coupling or symmetry
    Verify(VerifyArgs),
    /// Racah coefficients for three coupled su(1,1) representations
    RacahTable(TableArgs),
    /// Racah polynomial values by three methods
    Poly(PolyArgs),
    /// Energies and degeneracies of the superintegrable model
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// algebra | coupling | symmetry
    #[arg(long)]
    pub suite: Option<String>,
    /// nu1,nu2,nu3
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// k1,k2,k3
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// xi1,xi2,xi3,xi4 (algebra suite)
    #[arg(long, allow_hyphen_values = true)]
    pub roots: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// alpha,beta,gamma,delta (algebra suite, difference realization)
    #[arg(long, allow_hyphen_values = true)]
    pub racah: Option<String>,
    #[arg(long = "N")]
    pub n: Option<String>,
    /// add this to one structure constant to force a failure
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<String>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    #[arg(long = "N")]
    pub n: Option<String>,
    /// column pair and row pair, e.g. 12,23
    #[arg(long)]
    pub pairs: Option<String>,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    /// alpha,beta,gamma,delta
    #[arg(long, allow_hyphen_values = true)]
    pub racah: Option<String>,
    #[arg(long = "N")]
    pub n: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// largest N
    #[arg(long = "N")]
    pub n: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Flags merged with the config file.
struct Settings {
    backend: Backend,
    tol: Option<f64>,
    format: Format,
    output: Option<PathBuf>,
    config: HashMap<String, String>,
}

impl Settings {
    fn get(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.config.get(key).cloned())
    }

    fn require(&self, flag: &Option<String>, key: &str) -> Result<String, CliError> {
        self.get(flag, key).ok_or_else(|| CliError::Config(format!("missing --{key}")))
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidParams(_)
            | Error::InvalidRacahParams(_)
            | Error::InvalidSpec(_)
            | Error::PatternMismatch(_)
            | Error::DegenerateAlgebra { .. } => CliError::Config(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

/// Command output before formatting.
struct Output {
    json: Value,
    csv: Vec<Vec<String>>,
    passed: bool,
}

pub fn parse_config(text: &str) -> Result<HashMap<String, String>, Error> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", lineno + 1)))?;
        map.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn parse_list<T: Scalar>(s: &str, len: usize, what: &str) -> Result<Vec<T>, Error> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
    if items.len() != len {
        return Err(Error::Parse(format!("--{what} needs {len} comma-separated values, got `{s}`")));
    }
    items.into_iter().map(parse_scalar::<T>).collect()
}

fn parse_n(s: &str) -> Result<usize, Error> {
    s.trim().parse().map_err(|_| Error::Parse(format!("--N must be a nonnegative integer, got `{s}`")))
}

fn triple<T: Scalar>(v: Vec<T>) -> [T; 3] {
    let mut it = v.into_iter();
    [0, 1, 2].map(|_| it.next().unwrap_or_else(T::zero))
}

fn quad<T: Scalar>(v: Vec<T>) -> [T; 4] {
    let mut it = v.into_iter();
    [0, 1, 2, 3].map(|_| it.next().unwrap_or_else(T::zero))
}

fn num_list<T: Scalar>(v: &[T]) -> Vec<Num> {
    v.iter().map(Num::from_scalar).collect()
}

/// Entry point used by the binary. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(CliError::Config(msg)) => {
            let _ = writeln!(err, "config error: {msg}");
            EXIT_CONFIG
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(err, "failure: {msg}");
            EXIT_FAIL
        }
    }
}

fn settings(cli: &Cli) -> Result<Settings, CliError> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => HashMap::new(),
    };
    let backend = cli
        .backend
        .clone()
        .or_else(|| config.get("backend").cloned())
        .map(|s| s.parse::<Backend>())
        .transpose()?
        .unwrap_or(Backend::Exact);
    let tol = match cli.tol {
        Some(t) => Some(t),
        None => config
            .get("tol")
            .map(|s| s.parse::<f64>().map_err(|_| CliError::Config(format!("invalid tol `{s}`"))))
            .transpose()?,
    };
    if tol.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
        return Err(CliError::Config("tol must be a finite nonnegative number".into()));
    }
    let format = match cli.format.clone().or_else(|| config.get("format").cloned()).as_deref() {
        None | Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        Some(other) => return Err(CliError::Config(format!("unknown format `{other}`"))),
    };
    let output = cli.output.clone().or_else(|| config.get("output").map(PathBuf::from));
    Ok(Settings { backend, tol, format, output, config })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    let s = settings(&cli)?;
    let result = match (&cli.command, s.backend) {
        (Command::Verify(a), Backend::Exact) => cmd_verify::<Rational>(a, &s),
        (Command::Verify(a), Backend::Float) => cmd_verify::<f64>(a, &s),
        (Command::RacahTable(a), Backend::Exact) => cmd_racah_table::<Rational>(a, &s),
        (Command::RacahTable(a), Backend::Float) => cmd_racah_table::<f64>(a, &s),
        (Command::Poly(a), Backend::Exact) => cmd_poly::<Rational>(a, &s),
        (Command::Poly(a), Backend::Float) => cmd_poly::<f64>(a, &s),
        (Command::Spectrum(a), Backend::Exact) => cmd_spectrum::<Rational>(a, &s),
        (Command::Spectrum(a), Backend::Float) => cmd_spectrum::<f64>(a, &s),
    }?;
    emit(&result, &s, out)?;
    Ok(result.passed)
}

fn emit(result: &Output, s: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let bytes = match s.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&result.json).map_err(|e| CliError::Failure(e.to_string()))?;
            text.push('\n');
            text.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &result.csv {
                w.write_record(row).map_err(|e| CliError::Failure(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?
        }
    };
    match &s.output {
        Some(path) => write_file(path, &bytes),
        None => out.write_all(&bytes).map_err(|e| CliError::Failure(e.to_string())),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn residual_rows(report: &IdentityReport) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["identity".into(), "max_abs".into(), "relative".into(), "exact".into(), "passed".into()]];
    for r in &report.residuals {
        rows.push(vec![
            r.identity.clone(),
            crate::scalar::format_f64(r.max_abs),
            crate::scalar::format_f64(r.relative),
            r.exact.clone().unwrap_or_default(),
            r.passed.to_string(),
        ]);
    }
    rows
}

fn perturbed<T: Scalar>(mut sc: StructureConstants<T>, eps: &Option<T>) -> StructureConstants<T> {
    if let Some(e) = eps {
        sc.d = sc.d + e.clone();
    }
    sc
}

fn cmd_verify<T: Scalar>(a: &VerifyArgs, s: &Settings) -> Result<Output, CliError> {
    let suite = s.require(&a.suite, "suite")?;
    let perturb: Option<T> = s.get(&a.perturb, "perturb").map(|p| parse_scalar::<T>(&p)).transpose()?;
    let tol = s.tol.unwrap_or(match suite.as_str() {
        "coupling" => 1e-11,
        "symmetry" => 1e-9,
        _ => 1e-10,
    });
    let (report, parameters) = match suite.as_str() {
        "algebra" => verify_algebra_suite::<T>(a, s, tol, &perturb)?,
        "coupling" => {
            let nu = triple(parse_list::<T>(&s.require(&a.nu, "nu")?, 3, "nu")?);
            let n = parse_n(&s.require(&a.n, "N")?)?;
            let spec = CouplingSpec::new(nu, n)?;
            let (ops, sc) = kappa_triple(&spec)?;
            let sc = perturbed(sc, &perturb);
            let mut report = verify_relations(&ops, &sc, tol)?;
            let t = spec.nu4();
            let c4 = t.clone() * (t - T::one());
            let space = CoupledSpace::new(&spec)?;
            let total = space.restrict(&space.block.total_casimir_sum());
            let block = FockBlock::grade(spec.nu.clone(), n);
            let q = params_from_roots(&roots_for_coupling(&spec).roots).q;
            let cas = casimir_matrix(&ops, &sc)?;
            report.extend(IdentityReport::new(vec![
                Residual::compare("C4=nu4(nu4-1)", &total, &Matrix::scalar(spec.n + 1, c4), tol),
                Residual::compare("C4 sum=direct", &block.total_casimir_sum(), &block.total_casimir_direct(), tol),
                Residual::compare("Q=qI", &cas, &Matrix::scalar(spec.n + 1, q), tol),
            ]));
            (report, json!({ "nu": num_list(&spec.nu), "N": n }))
        }
        "symmetry" => {
            let k = triple(parse_list::<T>(&s.require(&a.k, "k")?, 3, "k")?);
            let n = parse_n(&s.require(&a.n, "N")?)?;
            let params = ModelParams::new(k)?;
            let sq = build_symmetries(&params, n)?;
            let pert = Perturbation { commutator_constant: perturb.clone().unwrap_or_else(T::zero), ..Default::default() };
            let mut report = verify_symmetry_algebra_with(&sq, tol, &pert);
            report.extend(s_commutation(&params, n, tol.min(1e-11))?);
            (report, json!({ "k": num_list(&params.k), "N": n }))
        }
        other => return Err(CliError::Config(format!("unknown suite `{other}`"))),
    };
    let json = json!({
        "command": "verify",
        "suite": suite,
        "backend": if T::EXACT { "exact" } else { "float" },
        "parameters": parameters,
        "tol": tol,
        "passed": report.passed,
        "residuals": report.residuals,
    });
    Ok(Output { csv: residual_rows(&report), json, passed: report.passed })
}

fn verify_algebra_suite<T: Scalar>(a: &VerifyArgs, s: &Settings, tol: f64, perturb: &Option<T>) -> Result<(IdentityReport, Value), CliError> {
    let n = parse_n(&s.require(&a.n, "N")?)?;
    if let Some(r) = s.get(&a.racah, "racah") {
        let [al, be, ga, de] = quad(parse_list::<T>(&r, 4, "racah")?);
        let p = RacahParams::new(al, be, ga, de, n)?;
        let (ops, sc) = realize_difference_algebra(&p)?;
        let report = verify_relations(&ops, &perturbed(sc, perturb), tol)?;
        let params = json!({ "racah": num_list(&[p.alpha, p.beta, p.gamma, p.delta]), "N": n });
        return Ok((report, params));
    }
    let spec: IrrepSpec<T> = match (s.get(&a.roots, "roots"), s.get(&a.sigma, "sigma"), s.get(&a.nu, "nu")) {
        (Some(r), Some(sig), _) => IrrepSpec::new(quad(parse_list::<T>(&r, 4, "roots")?), parse_scalar::<T>(&sig)?, n),
        (None, None, Some(nu)) => roots_for_coupling(&CouplingSpec::new(triple(parse_list::<T>(&nu, 3, "nu")?), n)?),
        _ => return Err(CliError::Config("algebra suite needs --roots with --sigma, --nu, or --racah".into())),
    };
    let form = if T::EXACT { Form::Monic } else { Form::Symmetric };
    let ops = build_realization(&spec, form)?;
    let p = spec.params();
    let sc = perturbed(p.structure_constants(), perturb);
    let mut report = verify_relations(&ops, &sc, tol)?;
    let cas = casimir_matrix(&ops, &sc)?;
    report.extend(IdentityReport::new(vec![Residual::compare(
        "Q=qI",
        &cas,
        &Matrix::scalar(spec.dim(), p.q.clone()),
        tol,
    )]));
    let params = json!({
        "roots": num_list(&spec.roots),
        "sigma": Num::from_scalar(&spec.sigma),
        "N": n,
        "q": Num::from_scalar(&casimir_value(&cas, tol).unwrap_or(p.q)),
    });
    Ok((report, params))
}

fn cmd_racah_table<T: Scalar>(a: &TableArgs, s: &Settings) -> Result<Output, CliError> {
    let nu = triple(parse_list::<T>(&s.require(&a.nu, "nu")?, 3, "nu")?);
    let n = parse_n(&s.require(&a.n, "N")?)?;
    let (cols, rows) = match s.get(&a.pairs, "pairs") {
        Some(p) => {
            let (c, r) = p.split_once(',').ok_or_else(|| CliError::Config(format!("--pairs expects `12,23`, got `{p}`")))?;
            (c.parse::<Pair>()?, r.parse::<Pair>()?)
        }
        None => (Pair::P12, Pair::P23),
    };
    if cols == rows {
        return Err(CliError::Config("--pairs needs two different pairs".into()));
    }
    let spec = CouplingSpec::new(nu, n)?;
    let table = overlap_table(&spec, cols, rows)?;
    let orth = table.orthogonality_residual();
    let passed = orth <= s.tol.unwrap_or(1e-12);
    let mut csv = Vec::new();
    let mut header = vec![format!("nu{}\\nu{}", rows.label(), cols.label())];
    header.extend(table.cols_nu12.iter().map(Num::to_string));
    csv.push(header);
    for (label, row) in table.rows_nu23.iter().zip(&table.coeffs) {
        let mut line = vec![label.to_string()];
        line.extend(row.iter().map(Num::to_string));
        csv.push(line);
    }
    let json = serde_json::to_value(&table).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(Output { json, csv, passed })
}

#[derive(Serialize)]
struct PolyReport {
    command: &'static str,
    backend: &'static str,
    params: Value,
    /// `[n][x]`, non-monic `R_n(lambda(x))`
    hypergeometric: Vec<Vec<Num>>,
    recurrence: Vec<Vec<Num>>,
    difference: Vec<Vec<Num>>,
    max_discrepancy: Num,
    passed: bool,
}

fn cmd_poly<T: Scalar>(a: &PolyArgs, s: &Settings) -> Result<Output, CliError> {
    let [al, be, ga, de] = quad(parse_list::<T>(&s.require(&a.racah, "racah")?, 4, "racah")?);
    let n = parse_n(&s.require(&a.n, "N")?)?;
    let p = RacahParams::new(al, be, ga, de, n)?;
    let mut hyp = Vec::new();
    let mut rec = Vec::new();
    let mut dif = Vec::new();
    let mut worst = T::zero();
    let mut worst_rel = 0.0f64;
    for k in 0..=n {
        let h: Vec<T> = (0..=n).map(|x| racah_hypergeometric(k, x, &p, false)).collect::<Result<_, _>>()?;
        let r: Vec<T> = (0..=n).map(|x| racah_recurrence_eval(k, x, &p)).collect::<Result<_, _>>()?;
        let d = difference_eigenfunction(k, &p)?;
        for x in 0..=n {
            for other in [&r[x], &d[x]] {
                let diff = (h[x].clone() - other.clone()).abs();
                worst_rel = worst_rel.max(diff.to_f64() / (1.0 + h[x].to_f64().abs()));
                if diff > worst {
                    worst = diff;
                }
            }
        }
        hyp.push(num_list(&h));
        rec.push(num_list(&r));
        dif.push(num_list(&d));
    }
    let passed = if T::EXACT { worst.is_zero() } else { worst_rel <= s.tol.unwrap_or(1e-10) };
    let report = PolyReport {
        command: "poly",
        backend: if T::EXACT { "exact" } else { "float" },
        params: json!({
            "alpha": Num::from_scalar(&p.alpha),
            "beta": Num::from_scalar(&p.beta),
            "gamma": Num::from_scalar(&p.gamma),
            "delta": Num::from_scalar(&p.delta),
            "N": n,
        }),
        max_discrepancy: Num::from_scalar(&worst),
        hypergeometric: hyp,
        recurrence: rec,
        difference: dif,
        passed,
    };
    let mut csv = vec![vec!["n".into(), "x".into(), "hypergeometric".into(), "recurrence".into(), "difference".into()]];
    for k in 0..=n {
        for x in 0..=n {
            csv.push(vec![
                k.to_string(),
                x.to_string(),
                report.hypergeometric[k][x].to_string(),
                report.recurrence[k][x].to_string(),
                report.difference[k][x].to_string(),
            ]);
        }
    }
    let json = serde_json::to_value(&report).map_err(|e| CliError::Failure(e.to_string()))?;
    Ok(Output { json, csv, passed })
}

fn cmd_spectrum<T: Scalar>(a: &SpectrumArgs, s: &Settings) -> Result<Output, CliError> {
    let k = triple(parse_list::<T>(&s.require(&a.k, "k")?, 3, "k")?);
    let n_max = parse_n(&s.require(&a.n, "N")?)?;
    let params = ModelParams::new(k)?;
    let rows = energy_spectrum(&params, n_max)?;
    let passed = rows.iter().all(|r| r.consistent && r.degeneracy == r.n + 1 && r.distinct_c12 == r.n + 1);
    let mut csv = vec![vec!["N".into(), "energy".into(), "degeneracy".into()]];
    for r in &rows {
        csv.push(vec![r.n.to_string(), r.energy.to_string(), r.degeneracy.to_string()]);
    }
    let json = json!({
        "command": "spectrum",
        "backend": if T::EXACT { "exact" } else { "float" },
        "k": num_list(&params.k),
        "N_max": n_max,
        "rows": rows,
        "passed": passed,
    });
    Ok(Output { json, csv, passed })
}
