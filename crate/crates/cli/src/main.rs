use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ksp_core::bounds::{self, Enclosure, Sign};
use ksp_core::discretization::{self, hankel_coefficients, GramEntries, Mode};
use ksp_core::geometry::solve_epsilon;
use ksp_core::mertens;
use ksp_core::spectra::{self, Model, Solver, Spectrum, SpectrumOptions};

mod output;

use output::{Format, Sink};

#[derive(Parser, Debug)]
#[command(name = "ksp", version, about = "Spectra and error bounds for the kernel 1/2 - {1/(xy)}")]
struct Cli {
    /// Worker threads (MS_THREADS overrides; default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Write data output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve 2 sinh(e) = exp(-N e). JSON: N, epsilon, delta, Delta, residual.
    Epsilon(NArg),
    /// Hankel coefficients. CSV columns: n, k_n, sigma_n, mu_tilde_n, mu_dprime_n, eta_n.
    Hankel(NArg),
    /// Dense Gram matrix Z(N). CSV: one row per matrix row; exact entries as p/q.
    Gram(GramArgs),
    /// Reciprocal eigenvalues. CSV columns: sign, index, nu, residual.
    Spectrum(SpectrumArgs),
    /// Norm bounds at N.
    Norms(NormsArgs),
    /// |U(N)| by enumeration. CSV columns: p, q (with --points) or N, count, lemma42_bound.
    Ucount(UArgs),
    /// Certified enclosures. CSV columns: k, sign, lo, hi, center, radius, source, capped_lo, capped_hi.
    Enclose(SpectrumArgs),
    /// Lower bound for a gap between two reciprocal eigenvalues of K.
    Gap(GapArgs),
    /// Evaluate the eigenvalue decay bound for k and N.
    T7(T7Args),
    /// Identity check for M(N^2) and the spectral split of the quadratic form.
    Mertens(MertensArgs),
    /// The twelve extreme reciprocal eigenvalues of H(N) and the three norm lines.
    Table7(TableArgs),
}

#[derive(Args, Debug)]
struct NArg {
    #[arg(long)]
    n: usize,
}

#[derive(Args, Debug)]
struct GramArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Exact => Mode::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Dagger,
    Triangle,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Dagger => Model::Dagger,
            ModelArg::Triangle => Model::Triangle,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverArg {
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    /// Pairs per sign; omit for the full dense spectrum.
    #[arg(long)]
    k: Option<usize>,
    /// Defaults to dense for N <= 2048, Lanczos above.
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct NormsArgs {
    #[arg(long)]
    n: usize,
    /// Skip the |U(N)| enumeration.
    #[arg(long)]
    no_u: bool,
}

#[derive(Args, Debug)]
struct UArgs {
    #[arg(long)]
    n: usize,
    /// Include the member cells.
    #[arg(long)]
    points: bool,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    i: usize,
    #[arg(long)]
    j: usize,
    #[arg(long, value_enum)]
    sign: SignArg,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug)]
struct T7Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: f64,
    #[arg(long, value_enum)]
    kind: ModelArg,
}

#[derive(Args, Debug)]
struct MertensArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Spectral truncation threshold on |nu|; needs the dense spectrum of Z(N).
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Validated configuration for one run.
#[derive(Debug)]
struct RunConfig {
    command: Command,
    format: Option<Format>,
    output: Option<PathBuf>,
}

struct Usage(String);

fn usage(msg: impl Into<String>) -> Usage {
    Usage(msg.into())
}

fn solver_for(n: usize, s: Option<SolverArg>, k: Option<usize>) -> Solver {
    match s {
        Some(SolverArg::Dense) => Solver::Dense,
        Some(SolverArg::Lanczos) => Solver::Lanczos,
        None if n <= 2048 || k.is_none() => Solver::Dense,
        None => Solver::Lanczos,
    }
}

fn validate(cli: Cli) -> std::result::Result<RunConfig, Usage> {
    let format = match (cli.json, cli.csv) {
        (true, _) => Some(Format::Json),
        (_, true) => Some(Format::Csv),
        _ => None,
    };
    let need_n = |n: usize, lo: usize| {
        if n < lo {
            Err(usage(format!("--n must be at least {lo}")))
        } else {
            Ok(())
        }
    };
    match &cli.command {
        Command::Epsilon(a) | Command::Hankel(a) => need_n(a.n, 3)?,
        Command::Gram(a) => {
            need_n(a.n, 1)?;
            if matches!(a.mode, ModeArg::Exact) && a.n > discretization::EXACT_CAP {
                return Err(usage(format!("exact mode needs --n <= {}", discretization::EXACT_CAP)));
            }
        }
        Command::Spectrum(a) | Command::Enclose(a) => {
            need_n(a.n, if matches!(a.model, ModelArg::Triangle) { 3 } else { 1 })?;
            if a.k == Some(0) {
                return Err(usage("--k must be positive"));
            }
            let solver = solver_for(a.n, a.solver, a.k);
            if solver == Solver::Lanczos && a.k.is_none() {
                return Err(usage("the Lanczos solver needs --k"));
            }
            if solver == Solver::Dense && a.n > spectra::DENSE_CAP {
                return Err(usage(format!("dense solver needs --n <= {}", spectra::DENSE_CAP)));
            }
            if matches!(a.model, ModelArg::Dagger) && matches!(cli.command, Command::Enclose(_)) && a.n < 25 {
                return Err(usage("dagger enclosures need --n >= 25"));
            }
        }
        Command::Norms(a) => need_n(a.n, 3)?,
        Command::Ucount(a) => need_n(a.n, 1)?,
        Command::Gap(a) => {
            need_n(a.n, if matches!(a.model, ModelArg::Triangle) { 3 } else { 25 })?;
            if a.i == 0 || a.j < a.i {
                return Err(usage("need 1 <= --i <= --j"));
            }
        }
        Command::T7(a) => {
            if a.k < 9 || a.n < a.k {
                return Err(usage("need --n >= --k >= 9"));
            }
            if !(a.c > 0.0) {
                return Err(usage("--c must be positive"));
            }
        }
        Command::Mertens(a) => {
            need_n(a.n, 1)?;
            if let Some(d) = a.delta {
                if !(d >= 0.0) {
                    return Err(usage("--delta must be non-negative"));
                }
                if a.n > spectra::DENSE_CAP {
                    return Err(usage(format!("--delta needs --n <= {}", spectra::DENSE_CAP)));
                }
            }
        }
        Command::Table7(a) => need_n(a.n, 3)?,
    }
    Ok(RunConfig { command: cli.command, format, output: cli.out })
}

fn threads_from_env(flag: Option<usize>) -> std::result::Result<Option<usize>, Usage> {
    match std::env::var("MS_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t > 0)
            .map(Some)
            .ok_or_else(|| usage(format!("MS_THREADS must be a positive integer, got {v:?}"))),
        Err(_) => match flag {
            Some(0) => Err(usage("--threads must be positive")),
            other => Ok(other),
        },
    }
}

#[cfg(feature = "parallel")]
fn set_threads(t: Option<usize>) -> Result<()> {
    if let Some(t) = t {
        use anyhow::Context;
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("thread pool")?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: Option<usize>) -> Result<()> {
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = match threads_from_env(cli.threads) {
        Ok(t) => t,
        Err(Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let config = match validate(cli) {
        Ok(c) => c,
        Err(Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    match set_threads(threads).and_then(|_| dispatch(config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn progress(msg: &str) {
    eprintln!("[ksp] {msg}");
}

fn dispatch(config: RunConfig) -> Result<()> {
    let mut sink = Sink::new(config.format, config.output.as_deref())?;
    match config.command {
        Command::Epsilon(a) => epsilon(&mut sink, a.n),
        Command::Hankel(a) => hankel(&mut sink, a.n),
        Command::Gram(a) => gram(&mut sink, a.n, a.mode.into()),
        Command::Spectrum(a) => {
            let s = compute_spectrum(&a)?;
            write_spectrum(&mut sink, &s)
        }
        Command::Norms(a) => {
            let r = bounds::norm_report(a.n, !a.no_u)?;
            sink.record(&r, Format::Json)
        }
        Command::Ucount(a) => ucount(&mut sink, a.n, a.points),
        Command::Enclose(a) => enclose(&mut sink, &a),
        Command::Gap(a) => gap(&mut sink, &a),
        Command::T7(a) => t7(&mut sink, &a),
        Command::Mertens(a) => mertens_cmd(&mut sink, &a),
        Command::Table7(a) => table7(&mut sink, a.n, a.seed),
    }?;
    sink.finish()
}

#[derive(Serialize)]
struct EpsilonOut {
    #[serde(rename = "N")]
    n: usize,
    epsilon: f64,
    delta: f64,
    #[serde(rename = "Delta")]
    big_delta: f64,
    residual: f64,
}

fn epsilon(sink: &mut Sink, n: usize) -> Result<()> {
    let g = solve_epsilon(n)?;
    let out = EpsilonOut { n, epsilon: g.epsilon, delta: g.delta, big_delta: g.big_delta, residual: g.residual() };
    sink.record(&out, Format::Json)
}

#[derive(Serialize)]
struct HankelRow {
    n: usize,
    k_n: u64,
    sigma_n: f64,
    mu_tilde_n: f64,
    mu_dprime_n: f64,
    eta_n: f64,
}

fn hankel(sink: &mut Sink, n: usize) -> Result<()> {
    let m = hankel_coefficients(&solve_epsilon(n)?);
    let rows: Vec<HankelRow> = (0..n)
        .map(|i| HankelRow {
            n: i + 1,
            k_n: m.k[i],
            sigma_n: m.sigma[i],
            mu_tilde_n: m.mu_tilde[i],
            mu_dprime_n: m.mu_dprime[i],
            eta_n: m.eta[i],
        })
        .collect();
    sink.rows(&rows, Format::Csv)
}

#[derive(Serialize)]
struct GramOut {
    #[serde(rename = "N")]
    n: usize,
    mode: Mode,
    entries: Vec<Vec<String>>,
}

fn gram(sink: &mut Sink, n: usize, mode: Mode) -> Result<()> {
    let z = discretization::build_z(n, mode)?;
    let cell = |idx: usize| match &z.entries {
        GramEntries::Float(v) => output::num(v[idx]),
        GramEntries::Exact(v) if *v[idx].denom() == 1 => v[idx].numer().to_string(),
        GramEntries::Exact(v) => format!("{}/{}", v[idx].numer(), v[idx].denom()),
    };
    let rows: Vec<Vec<String>> = (0..n).map(|i| (0..n).map(|j| cell(i * n + j)).collect()).collect();
    match sink.format_or(Format::Csv) {
        Format::Csv => sink.raw_rows(&rows),
        _ => sink.record(&GramOut { n, mode, entries: rows }, Format::Json),
    }
}

fn options(n: usize, k: Option<usize>, solver: Option<SolverArg>, seed: u64, max_iter: Option<usize>) -> SpectrumOptions {
    SpectrumOptions { k, solver: solver_for(n, solver, k), seed, vectors: false, max_iter }
}

fn spectrum_for(model: Model, n: usize, opts: &SpectrumOptions) -> Result<Spectrum> {
    if opts.solver == Solver::Lanczos {
        let name = if model == Model::Dagger { "Z" } else { "H" };
        progress(&format!("Lanczos on {name}({n})"));
    }
    Ok(match model {
        Model::Dagger => spectra::spectrum_of_z(n, opts)?,
        Model::Triangle => spectra::spectrum_of_h(&hankel_coefficients(&solve_epsilon(n)?), opts)?,
    })
}

fn compute_spectrum(a: &SpectrumArgs) -> Result<Spectrum> {
    let opts = options(a.n, a.k, a.solver, a.seed, a.max_iter);
    spectrum_for(a.model.into(), a.n, &opts)
}

#[derive(Serialize)]
struct SpectrumRow {
    sign: &'static str,
    index: usize,
    nu: f64,
    residual: Option<f64>,
}

fn write_spectrum(sink: &mut Sink, s: &Spectrum) -> Result<()> {
    match sink.format_or(Format::Json) {
        Format::Csv => {
            let res = |i: usize| s.residuals.get(i).copied();
            let np = s.nu_plus.len();
            let mut rows = Vec::new();
            for (i, &nu) in s.nu_plus.iter().enumerate() {
                rows.push(SpectrumRow { sign: "plus", index: i + 1, nu, residual: res(i) });
            }
            for (i, &nu) in s.nu_minus.iter().enumerate() {
                rows.push(SpectrumRow { sign: "minus", index: i + 1, nu, residual: res(np + i) });
            }
            sink.rows(&rows, Format::Csv)
        }
        _ => sink.record(s, Format::Json),
    }
}

#[derive(Serialize)]
struct UOut {
    #[serde(rename = "N")]
    n: usize,
    count: u64,
    lemma42_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<(u32, u32)>>,
}

#[derive(Serialize)]
struct PointRow {
    p: u32,
    q: u32,
}

fn ucount(sink: &mut Sink, n: usize, points: bool) -> Result<()> {
    let u = bounds::enumerate_u(n, points)?;
    let out = UOut { n, count: u.count, lemma42_bound: bounds::lemma42_bound(n), points: u.points };
    match (sink.format_or(Format::Json), &out.points) {
        (Format::Csv, Some(p)) => {
            let rows: Vec<PointRow> = p.iter().map(|&(p, q)| PointRow { p, q }).collect();
            sink.rows(&rows, Format::Csv)
        }
        (Format::Csv, None) => {
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "N")]
                n: usize,
                count: u64,
                lemma42_bound: f64,
            }
            sink.rows(&[Row { n, count: out.count, lemma42_bound: out.lemma42_bound }], Format::Csv)
        }
        _ => sink.record(&out, Format::Json),
    }
}

#[derive(Serialize)]
struct EnclosureRow {
    k: usize,
    sign: Sign,
    lo: f64,
    hi: f64,
    center: f64,
    radius: f64,
    source: Model,
    capped_lo: f64,
    capped_hi: f64,
}

fn enclosure_rows(es: &[Enclosure]) -> Vec<EnclosureRow> {
    es.iter()
        .map(|e| {
            let (capped_lo, capped_hi) = e.capped();
            EnclosureRow {
                k: e.k,
                sign: e.sign,
                lo: e.lo,
                hi: e.hi,
                center: e.center,
                radius: e.radius,
                source: e.source,
                capped_lo,
                capped_hi,
            }
        })
        .collect()
}

fn enclose(sink: &mut Sink, a: &SpectrumArgs) -> Result<()> {
    let s = compute_spectrum(a)?;
    let r = bounds::certified_radius(&s)?;
    let es = bounds::enclose(&s, r)?;
    sink.rows(&enclosure_rows(&es), Format::Json)
}

#[derive(Serialize)]
struct GapOut {
    model: Model,
    #[serde(rename = "N")]
    n: usize,
    i: usize,
    j: usize,
    sign: Sign,
    nu_i: f64,
    nu_j: f64,
    norm_bound: f64,
    lower_bound: f64,
}

fn gap(sink: &mut Sink, a: &GapArgs) -> Result<()> {
    let model: Model = a.model.into();
    let opts = options(a.n, Some(a.j), a.solver, a.seed, None);
    let s = spectrum_for(model, a.n, &opts)?;
    let sign = match a.sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
    };
    let nb = bounds::certified_radius(&s)?;
    let lb = bounds::gap_lower_bound(&s, nb, a.i, a.j, sign)?;
    let seq = if sign == Sign::Plus { &s.nu_plus } else { &s.nu_minus };
    let out = GapOut { model, n: a.n, i: a.i, j: a.j, sign, nu_i: seq[a.i - 1], nu_j: seq[a.j - 1], norm_bound: nb, lower_bound: lb };
    sink.record(&out, Format::Json)
}

#[derive(Serialize)]
struct T7Row {
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "T")]
    t: f64,
    kappa: f64,
    theta1: f64,
    bound_311: f64,
    bound_316_first: Option<f64>,
    bound_316_second: Option<f64>,
    bound_317_first: Option<f64>,
    bound_317_second: Option<f64>,
    asymptotic: bool,
}

fn t7(sink: &mut Sink, a: &T7Args) -> Result<()> {
    let r = bounds::theorem7_eval(a.k, a.n, a.c, a.kind.into())?;
    match sink.format_or(Format::Json) {
        Format::Csv => {
            let row = T7Row {
                s: r.s,
                t: r.t,
                kappa: r.kappa,
                theta1: r.theta1,
                bound_311: r.bound_311,
                bound_316_first: r.bound_316.map(|p| p.0),
                bound_316_second: r.bound_316.map(|p| p.1),
                bound_317_first: r.bound_317.map(|p| p.0),
                bound_317_second: r.bound_317.map(|p| p.1),
                asymptotic: r.asymptotic,
            };
            sink.rows(&[row], Format::Csv)
        }
        _ => sink.record(&r, Format::Json),
    }
}

#[derive(Serialize)]
struct MertensOut {
    #[serde(rename = "N")]
    n: usize,
    mode: Mode,
    #[serde(rename = "M_N")]
    m_n: i64,
    #[serde(rename = "M_N2")]
    m_n2: i64,
    residual: mertens::Value,
    harmonic_sum: mertens::Value,
    quadratic_form: mertens::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    retained_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remainder: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectral: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_exceeds_threshold: Option<bool>,
}

fn mertens_cmd(sink: &mut Sink, a: &MertensArgs) -> Result<()> {
    let check = mertens::verify_identity_1_1(a.n, a.mode.into())?;
    let mut out = MertensOut {
        n: a.n,
        mode: check.mode,
        m_n: check.m_n,
        m_n2: check.m_n2,
        residual: check.residual,
        harmonic_sum: check.harmonic_sum,
        quadratic_form: check.quadratic_form,
        delta: None,
        retained_terms: None,
        remainder: None,
        direct: None,
        spectral: None,
        delta_exceeds_threshold: None,
    };
    if let Some(d) = a.delta {
        progress(&format!("dense spectrum of Z({}) with vectors", a.n));
        let table = mertens::sieve_mobius(a.n as u64)?;
        let mut o = SpectrumOptions::dense(None);
        o.vectors = true;
        let s = spectra::spectrum_of_z(a.n, &o)?;
        let q = mertens::quadratic_form_spectral(&table, &s, a.n, Some(d))?;
        let t = q.truncated.expect("delta given");
        out.delta = Some(d);
        out.retained_terms = Some(t.retained_terms);
        out.remainder = Some(t.remainder);
        out.direct = Some(q.direct);
        out.spectral = Some(q.spectral);
        out.delta_exceeds_threshold = Some(t.delta_exceeds_threshold);
    }
    sink.record(&out, Format::Json)
}

#[derive(Serialize)]
struct TableRow {
    k: usize,
    nu_minus: f64,
    nu_plus: f64,
}

#[derive(Serialize)]
struct TableOut {
    #[serde(rename = "N")]
    n: usize,
    seed: u64,
    iterations: usize,
    rows: Vec<TableRow>,
    #[serde(rename = "V0_bound")]
    v0_bound: f64,
    #[serde(rename = "V1_bound")]
    v1_bound: f64,
    kbowtie_bound: f64,
}

fn table7(sink: &mut Sink, n: usize, seed: u64) -> Result<()> {
    let geom = solve_epsilon(n)?;
    let model = hankel_coefficients(&geom);
    let k = 6.min(n);
    let solver = if n <= 2048 { Solver::Dense } else { Solver::Lanczos };
    let opts = SpectrumOptions { k: Some(k), solver, seed, vectors: false, max_iter: None };
    progress(&format!("{} solve for H({n})", if solver == Solver::Dense { "dense" } else { "Lanczos" }));
    let s = spectra::spectrum_of_h(&model, &opts)?;
    if s.nu_plus.len() < k || s.nu_minus.len() < k {
        bail!("H({n}) has fewer than {k} nonzero eigenvalues of each sign");
    }
    let rows: Vec<TableRow> = (0..k).map(|i| TableRow { k: i + 1, nu_minus: s.nu_minus[i], nu_plus: s.nu_plus[i] }).collect();
    let out = TableOut {
        n,
        seed,
        iterations: s.iterations,
        rows,
        v0_bound: bounds::v0_bound(&model),
        v1_bound: bounds::v1_bound(&geom),
        kbowtie_bound: bounds::kbowtie_norm_bound(&model),
    };
    match sink.format() {
        Some(Format::Json) => sink.record(&out, Format::Json),
        Some(Format::Csv) => sink.rows(&out.rows, Format::Csv),
        None => {
            let mut text = String::new();
            text.push_str(&format!("{:>2}  {:>14}  {:>14}\n", "k", "nu_k-", "nu_k+"));
            for r in &out.rows {
                text.push_str(&format!("{:>2}  {:>14.10}  {:>14.10}\n", r.k, r.nu_minus, r.nu_plus));
            }
            text.push_str(&format!("V0 < {:.12}\n", out.v0_bound));
            text.push_str(&format!("V1 < {:.12}\n", out.v1_bound));
            text.push_str(&format!("||K_bowtie|| < {:.9}\n", out.kbowtie_bound));
            sink.text(&text)
        }
    }
}
