use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use sdecc_core::bitseq::MAX_LEN;
use sdecc_core::constraints::{build_model, parse_families, FamilyId, MAX_MODEL_N};
use sdecc_core::ilp::{
    read_lp, read_solution, solve_builtin, verify_solution, write_lp, ReadMode, SolverStatus, VerificationReport,
};
use sdecc_core::sdecc::{bounds, is_sdecc, max_sdecc_exact, ExactOptions, ProofStatus, Validity, EXACT_MAX_N};
use sdecc_core::vt::{perfectness, vt0_size, vt1_size, vt_code};
use sdecc_core::{Code, SearchOptions};

#[derive(Parser)]
#[command(name = "sdecc", version, about = "Single-deletion-correcting codes: construction, search, ILP models")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the Varshamov-Tenengolts code VT_a(n).
    Vt {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_LEN as i64))]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        /// List the codewords.
        #[arg(long)]
        list: bool,
        /// Print the closed-form sizes of VT_0(n) and VT_1(n).
        #[arg(long)]
        formula: bool,
        /// Report whether the deletion surfaces tile all words of length n-1.
        #[arg(long)]
        perfect: bool,
    },
    /// Check whether a code file is single-deletion-correcting.
    Check {
        #[arg(long)]
        code: PathBuf,
    },
    /// Compute M(n) by exact search.
    Max {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=EXACT_MAX_N as i64))]
        n: u32,
        /// Wall-clock limit in seconds.
        #[arg(long, value_parser = parse_seconds)]
        time_limit: Option<Duration>,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Code file used as the starting incumbent.
        #[arg(long)]
        incumbent: Option<PathBuf>,
    },
    /// Write an LP model for the selected constraint families.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..=MAX_MODEL_N as i64))]
        n: u32,
        /// Comma-separated families, e.g. c0,c1,c4. C0 is always included.
        #[arg(long, value_parser = parse_family_list, default_value = "c0")]
        families: Families,
        /// Prefix and suffix lengths for a C6 family; repeatable.
        #[arg(long = "c6", value_name = "P,Q", value_parser = parse_split)]
        c6: Vec<(usize, usize)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an LP model written by `gen` with the built-in solver.
    Solve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = parse_seconds)]
        time_limit: Option<Duration>,
        #[arg(long)]
        node_limit: Option<u64>,
        /// Write the solution as `name value` lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a solution file against a model and the code definition.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        /// Reject values that are not within 1e-6 of 0 or 1.
        #[arg(long)]
        strict: bool,
    },
    /// Lower and upper bounds on M(n) with reference values.
    Bounds {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..=62))]
        n: u32,
    },
}

fn parse_seconds(s: &str) -> Result<Duration, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number of seconds"))?;
    Duration::try_from_secs_f64(v).map_err(|_| format!("{s:?} is not a nonnegative duration"))
}

/// A parsed `--families` list.
#[derive(Clone)]
struct Families(Vec<FamilyId>);

fn parse_family_list(s: &str) -> Result<Families, String> {
    parse_families(s).map(Families).map_err(|e| e.to_string())
}

fn parse_split(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or_else(|| format!("expected P,Q, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("{t:?} is not a length"));
    Ok((num(p)?, num(q)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn read_code(path: &Path) -> Result<Code> {
    Code::read(open(path)?).with_context(|| format!("reading code {}", path.display()))
}

fn search_options(time_limit: Option<Duration>, node_limit: Option<u64>) -> SearchOptions {
    SearchOptions { time_limit, node_limit }
}

fn words(code: &Code) -> Vec<String> {
    code.iter().map(ToString::to_string).collect()
}

fn emit<T: Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct Conflict {
    first: String,
    second: String,
    shared: String,
}

fn conflict(v: &Validity) -> Option<Conflict> {
    match v {
        Validity::Valid => None,
        Validity::Conflict { first, second, shared } => {
            Some(Conflict { first: first.to_string(), second: second.to_string(), shared: shared.to_string() })
        }
    }
}

#[derive(Serialize)]
struct VtReport {
    n: u32,
    a: i64,
    /// `a` reduced mod n+1.
    residue: i64,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    words: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vt0_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vt1_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    perfect: Option<PerfectReport>,
}

#[derive(Serialize)]
struct PerfectReport {
    perfect: bool,
    uncovered: usize,
    overlaps: usize,
    surface_sizes: Vec<usize>,
}

fn cmd_vt(
    out: &mut impl Write,
    json: bool,
    n: u32,
    a: i64,
    list: bool,
    formula: bool,
    perfect: bool,
) -> Result<ExitCode> {
    let n_us = n as usize;
    let code = vt_code(n_us, a)?;
    let (vt0, vt1) = if formula { (Some(vt0_size(n_us)?), Some(vt1_size(n_us)?)) } else { (None, None) };
    let perfect = if perfect && n >= 2 {
        let p = perfectness(&code)?;
        Some(PerfectReport {
            perfect: p.is_perfect(),
            uncovered: p.uncovered,
            overlaps: p.overlaps,
            surface_sizes: p.surface_sizes,
        })
    } else if perfect {
        anyhow::bail!("perfectness needs n >= 2");
    } else {
        None
    };
    let report = VtReport {
        n,
        a,
        residue: a.rem_euclid(n as i64 + 1),
        size: code.len(),
        words: list.then(|| words(&code)),
        vt0_size: vt0,
        vt1_size: vt1,
        perfect,
    };
    if json {
        emit(out, &report)?;
        return Ok(ExitCode::SUCCESS);
    }
    writeln!(out, "|VT_{}({n})| = {}", report.residue, report.size)?;
    if let (Some(v0), Some(v1)) = (report.vt0_size, report.vt1_size) {
        writeln!(out, "vt0_size({n}) = {v0}")?;
        writeln!(out, "vt1_size({n}) = {v1}")?;
    }
    if let Some(p) = &report.perfect {
        let sizes: Vec<String> = p.surface_sizes.iter().map(ToString::to_string).collect();
        writeln!(out, "perfect: {}", if p.perfect { "yes" } else { "no" })?;
        writeln!(out, "uncovered: {}, overlaps: {}", p.uncovered, p.overlaps)?;
        writeln!(out, "surface sizes: {}", sizes.join(","))?;
    }
    if let Some(ws) = &report.words {
        for w in ws {
            writeln!(out, "{w}")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CheckReport {
    n: usize,
    size: usize,
    valid: bool,
    conflict: Option<Conflict>,
}

fn cmd_check(out: &mut impl Write, json: bool, path: &Path) -> Result<ExitCode> {
    let code = read_code(path)?;
    let v = is_sdecc(&code)?;
    let report = CheckReport { n: code.length(), size: code.len(), valid: v.is_valid(), conflict: conflict(&v) };
    if json {
        emit(out, &report)?;
    } else {
        writeln!(out, "length {}, {} words", report.n, report.size)?;
        match &report.conflict {
            None => writeln!(out, "sdecc: yes")?,
            Some(c) => writeln!(out, "sdecc: no, {} and {} both delete to {}", c.first, c.second, c.shared)?,
        }
    }
    Ok(if report.valid { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[derive(Serialize)]
struct MaxReport {
    n: u32,
    size: usize,
    status: String,
    nodes: u64,
    witness: Vec<String>,
}

fn cmd_max(
    out: &mut impl Write,
    json: bool,
    n: u32,
    time_limit: Option<Duration>,
    node_limit: Option<u64>,
    incumbent: Option<&Path>,
) -> Result<ExitCode> {
    let incumbent = incumbent.map(read_code).transpose()?;
    let opts = ExactOptions { search: search_options(time_limit, node_limit), incumbent };
    let r = max_sdecc_exact(n as usize, &opts)?;
    let report =
        MaxReport { n, size: r.size, status: r.status.to_string(), nodes: r.nodes, witness: words(&r.witness) };
    if json {
        emit(out, &report)?;
        return Ok(ExitCode::SUCCESS);
    }
    match r.status {
        ProofStatus::Optimal => writeln!(out, "M({n}) = {} ({})", r.size, r.status)?,
        ProofStatus::BoundLimited => writeln!(out, "M({n}) >= {} ({})", r.size, r.status)?,
    }
    writeln!(out, "nodes: {}", r.nodes)?;
    for w in &report.witness {
        writeln!(out, "{w}")?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct GenReport {
    n: u32,
    families: Vec<String>,
    c6: Vec<(usize, usize)>,
    rows: usize,
    variables: usize,
    bytes: usize,
    path: String,
}

fn cmd_gen(
    out: &mut impl Write,
    json: bool,
    n: u32,
    families: &[FamilyId],
    c6: &[(usize, usize)],
    path: &Path,
) -> Result<ExitCode> {
    let model = build_model(n as usize, families, c6)?;
    let mut sink = create(path)?;
    let bytes = write_lp(&model, &mut sink)?;
    sink.flush().with_context(|| format!("writing {}", path.display()))?;
    let meta = model.metadata();
    let report = GenReport {
        n,
        families: meta.families.iter().map(ToString::to_string).collect(),
        c6: meta.c6_splits.clone(),
        rows: model.constraints().len(),
        variables: model.variable_count(),
        bytes,
        path: path.display().to_string(),
    };
    if json {
        emit(out, &report)?;
    } else {
        writeln!(out, "families: {}", report.families.join(","))?;
        if !report.c6.is_empty() {
            let splits: Vec<String> = report.c6.iter().map(|(p, q)| format!("{p},{q}")).collect();
            writeln!(out, "c6 splits: {}", splits.join(" "))?;
        }
        writeln!(out, "rows: {}, variables: {}, bytes: {}", report.rows, report.variables, report.bytes)?;
        writeln!(out, "wrote {}", report.path)?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SolveReport {
    n: usize,
    objective: i64,
    status: String,
    nodes: u64,
    code: Vec<String>,
}

fn cmd_solve(
    out: &mut impl Write,
    json: bool,
    path: &Path,
    time_limit: Option<Duration>,
    node_limit: Option<u64>,
    sol_out: Option<&Path>,
) -> Result<ExitCode> {
    let model = read_lp(open(path)?).with_context(|| format!("reading model {}", path.display()))?;
    let sol = solve_builtin(&model, &search_options(time_limit, node_limit))?;
    if let Some(p) = sol_out {
        if sol.status == SolverStatus::Unknown {
            eprintln!("no feasible assignment found; {} not written", p.display());
        } else {
            let mut sink = create(p)?;
            sol.write(&mut sink).and_then(|()| sink.flush()).with_context(|| format!("writing {}", p.display()))?;
        }
    }
    let report = SolveReport {
        n: model.n(),
        objective: sol.objective(),
        status: sol.status.to_string(),
        nodes: sol.nodes,
        code: words(&sol.selected()),
    };
    if json {
        emit(out, &report)?;
    } else {
        writeln!(out, "objective = {} ({})", report.objective, report.status)?;
        writeln!(out, "nodes: {}", report.nodes)?;
        for w in &report.code {
            writeln!(out, "{w}")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    objective: i64,
    claimed_objective: Option<i64>,
    length_mismatch: bool,
    violated: Vec<String>,
    sdecc: Option<bool>,
    conflict: Option<Conflict>,
}

impl From<&VerificationReport> for VerifyReport {
    fn from(r: &VerificationReport) -> Self {
        VerifyReport {
            passed: r.passed(),
            objective: r.objective,
            claimed_objective: r.claimed_objective,
            length_mismatch: r.length_mismatch,
            violated: r.violated.clone(),
            sdecc: r.validity.as_ref().map(Validity::is_valid),
            conflict: r.validity.as_ref().and_then(conflict),
        }
    }
}

fn cmd_verify(out: &mut impl Write, json: bool, model: &Path, solution: &Path, strict: bool) -> Result<ExitCode> {
    let m = read_lp(open(model)?).with_context(|| format!("reading model {}", model.display()))?;
    let mode = if strict { ReadMode::Strict } else { ReadMode::Rounding };
    let sol =
        read_solution(open(solution)?, &m, mode).with_context(|| format!("reading solution {}", solution.display()))?;
    let r = verify_solution(&m, &sol);
    if json {
        emit(out, &VerifyReport::from(&r))?;
    } else {
        write!(out, "{r}")?;
    }
    Ok(if r.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[derive(Serialize)]
struct BoundsReport {
    n: usize,
    lower_ratio: u64,
    vt0_size: u64,
    known_m: Option<u64>,
    known_upper: Option<u64>,
    upper_formula: u64,
    consistent: bool,
}

fn cmd_bounds(out: &mut impl Write, json: bool, n: u32) -> Result<ExitCode> {
    let b = bounds(n as usize)?;
    let report = BoundsReport {
        n: b.n,
        lower_ratio: b.lower_ratio,
        vt0_size: b.lower_vt,
        known_m: b.known_m,
        known_upper: b.known_upper,
        upper_formula: b.upper_kk,
        consistent: b.is_consistent(),
    };
    if json {
        emit(out, &report)?;
        return Ok(ExitCode::SUCCESS);
    }
    let opt = |v: Option<u64>| v.map_or_else(|| "unknown".to_string(), |x| x.to_string());
    writeln!(out, "n = {n}")?;
    writeln!(out, "ceil(2^n/(n+1))      = {}", report.lower_ratio)?;
    writeln!(out, "|VT_0(n)|            = {}", report.vt0_size)?;
    writeln!(out, "M(n)                 = {}", opt(report.known_m))?;
    writeln!(out, "known upper bound    = {}", opt(report.known_upper))?;
    writeln!(out, "floor((2^n-2)/(n-2)) = {}", report.upper_formula)?;
    writeln!(out, "consistent: {}", if report.consistent { "yes" } else { "no" })?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let json = cli.json;
    let code = match cli.command {
        Command::Vt { n, a, list, formula, perfect } => cmd_vt(&mut out, json, n, a, list, formula, perfect)?,
        Command::Check { code } => cmd_check(&mut out, json, &code)?,
        Command::Max { n, time_limit, node_limit, incumbent } => {
            cmd_max(&mut out, json, n, time_limit, node_limit, incumbent.as_deref())?
        }
        Command::Gen { n, families, c6, out: path } => cmd_gen(&mut out, json, n, &families.0, &c6, &path)?,
        Command::Solve { model, time_limit, node_limit, out: sol } => {
            cmd_solve(&mut out, json, &model, time_limit, node_limit, sol.as_deref())?
        }
        Command::Verify { model, solution, strict } => cmd_verify(&mut out, json, &model, &solution, strict)?,
        Command::Bounds { n } => cmd_bounds(&mut out, json, n)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    // Parse failures exit with status 2 from clap itself.
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        // A closed downstream pipe (e.g. `| head`) is not a failure.
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
