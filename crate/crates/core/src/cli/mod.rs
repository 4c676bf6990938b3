//! Experiment runner: argument handling, config files, CSV and JSON output.

mod args;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use randpovm::concentration::{self, ProjectionSide, TailReport};
use randpovm::group::{enumerate_subgroups, make_group, normal_core, FamilyTag, Representations};
use randpovm::hsp::HspContext;
use randpovm::identify::{identification_experiment, random_mixed_ensemble, random_pure_ensemble, CopyRule};
use randpovm::matrix::{DensityMatrix, C64};
use randpovm::measure::{frobenius_tv_experiment, random_pair_experiment, DistinguishReport, MeasurementMode};
use randpovm::random::RngStream;

use args::*;

pub const SCHEMA_VERSION: u32 = 1;
const SUBCOMMANDS: [&str; 5] = ["concentration", "distinguish", "hsp", "identify", "group-info"];

/// Exit statuses.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, UsageError>;

/// Splices `key=value` lines from `--config PATH` in right after the
/// subcommand, so that flags given on the command line override them.
fn expand_config(raw: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let mut args = Vec::with_capacity(raw.len());
    let mut config = None;
    let mut it = raw.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy().into_owned();
        if s == "--config" {
            config = Some(it.next().ok_or_else(|| UsageError("--config needs a path".into()))?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(OsString::from(p));
        } else {
            args.push(a);
        }
    }
    let Some(path) = config else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| UsageError(format!("cannot read config {path:?}: {e}")))?;
    let mut extra = Vec::new();
    let mut command = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "command" {
            command = Some(v.to_string());
            continue;
        }
        match v {
            "true" => extra.push(OsString::from(format!("--{k}"))),
            "false" => {}
            _ => {
                extra.push(OsString::from(format!("--{k}")));
                extra.push(OsString::from(v));
            }
        }
    }
    let pos = args.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    // Without a subcommand on the command line, the config's one goes first
    // so every command-line flag lands after it.
    let at = match (pos, command) {
        (Some(p), _) => p + 1,
        (None, Some(c)) => {
            let at = 1.min(args.len());
            args.insert(at, OsString::from(c));
            at + 1
        }
        (None, None) => args.len(),
    };
    args.splice(at..at, extra);
    Ok(args)
}

pub fn main_with_args(raw: Vec<OsString>) -> i32 {
    let args = match expand_config(raw) {
        Ok(a) => a,
        Err(UsageError(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return EXIT_USAGE;
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return EXIT_USAGE;
    }
    match run(&cli) {
        Ok(Some(true)) | Ok(None) => EXIT_PASS,
        Ok(Some(false)) => EXIT_FAIL,
        Err(UsageError(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
    }
}

struct Output {
    summary: Value,
    pass: Option<bool>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn seed(cli: &Cli) -> CliResult<u64> {
    cli.seed.ok_or_else(|| UsageError("--seed is required".into()))
}

fn need<T: Copy>(v: Option<T>, name: &str) -> CliResult<T> {
    v.ok_or_else(|| UsageError(format!("--{name} is required for this experiment")))
}

fn mode(kind: ModeKind, k: usize) -> MeasurementMode {
    match kind {
        ModeKind::HaarBasis => MeasurementMode::HaarBasis,
        ModeKind::PovmPlain => MeasurementMode::PovmPlain,
        ModeKind::PovmAncilla => MeasurementMode::PovmAncilla { k },
    }
}

fn parse_group(s: &str) -> CliResult<Representations> {
    let tag: FamilyTag = s.parse()?;
    Ok(Representations::new(make_group(&tag)?)?)
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn run(cli: &Cli) -> CliResult<Option<bool>> {
    let out = match &cli.command {
        Command::Concentration(a) => concentration_cmd(a, seed(cli)?)?,
        Command::Distinguish(a) => distinguish_cmd(a, seed(cli)?)?,
        Command::Hsp(a) => hsp_cmd(a, seed(cli)?)?,
        Command::Identify(a) => identify_cmd(a, seed(cli)?)?,
        Command::GroupInfo(a) => group_info_cmd(a)?,
    };
    if let Some(path) = &cli.out {
        write_csv(path, &out.header, &out.rows)?;
    }
    #[derive(Serialize)]
    struct Resolved<'a> {
        seed: Option<u64>,
        out: &'a Option<std::path::PathBuf>,
        json: &'a Option<std::path::PathBuf>,
        command: &'a Command,
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "version": env!("CARGO_PKG_VERSION"),
        "config": Resolved { seed: cli.seed, out: &cli.out, json: &cli.json, command: &cli.command },
        "summary": out.summary,
        "pass": out.pass,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    match &cli.json {
        Some(p) => fs::write(p, text).map_err(|e| UsageError(format!("cannot write {}: {e}", p.display())))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(out.pass)
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn tail_output(r: TailReport) -> Output {
    Output {
        header: TailReport::CSV_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: vec![r.csv_record().to_vec()],
        pass: r.pass,
        summary: serde_json::to_value(&r).expect("reports serialise"),
    }
}

fn concentration_cmd(a: &ConcentrationArgs, seed: u64) -> CliResult<Output> {
    let rng = RngStream::new(seed, 0);
    let r = match a.exp {
        Experiment::ChiSquare => concentration::chi_square_tail(need(a.n, "n")?, need(a.eps, "eps")?, a.trials, rng)?,
        Experiment::Projection => {
            let side = need(a.side, "side")?;
            let (side, v) = match side {
                Side::UpperT => (ProjectionSide::UpperT, need(a.t, "t")?),
                Side::TwoSidedEps => (ProjectionSide::TwoSidedEps, need(a.eps, "eps")?),
            };
            concentration::projection_tail(need(a.n, "n")?, need(a.k, "k")?, v, side, a.trials, rng)?
        }
        Experiment::GramSchmidt => {
            concentration::gram_schmidt_perturbation(need(a.n, "n")?, need(a.r, "r")?, need(a.big_m, "M")?, a.trials, rng)?
        }
        Experiment::GaussianNorm => concentration::gaussian_matrix_norm(need(a.n, "n")?, a.trials, rng)?,
        Experiment::Weighted => {
            let lambdas = match &a.lambdas {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|e| UsageError(format!("bad weight {x:?}: {e}"))))
                    .collect::<CliResult<Vec<_>>>()?,
                None => concentration::lambda_profile(
                    a.profile.as_deref().ok_or_else(|| UsageError("--profile or --lambdas is required".into()))?,
                    need(a.size, "size")?,
                )?,
            };
            concentration::weighted_chisquare_tails(&lambdas, a.trials, rng)?
        }
        Experiment::HighRank => concentration::high_rank_counterexample(need(a.n, "n")?, need(a.r, "r")?, a.trials, rng)?,
    };
    Ok(tail_output(r))
}

fn basis_state(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[i] = C64::new(1.0, 0.0);
    v
}

const TV_THRESHOLDS: [f64; 4] = [0.01, 0.05, 0.1, 0.25];

fn pair_summary(r: &DistinguishReport) -> Value {
    let fractions: serde_json::Map<String, Value> =
        TV_THRESHOLDS.iter().map(|&c| (format!("{c}"), json!(r.fraction_at_least(c)))).collect();
    json!({
        "frobenius": r.frobenius,
        "trace_distance": r.trace_distance,
        "min_tv": r.min_tv,
        "median_tv": r.median_tv,
        "mean_tv": r.mean_tv,
        "min_ratio": r.min_ratio,
        "median_ratio": r.median_ratio,
        "fraction_tv_at_least_c_f": fractions,
    })
}

/// Number of Gaussian vectors behind the measurement (`n` for a basis).
fn vector_count(mode: MeasurementMode, n: usize) -> usize {
    match mode {
        MeasurementMode::HaarBasis | MeasurementMode::PovmPlain => n,
        MeasurementMode::PovmAncilla { k } => n * k,
    }
}

fn distinguish_cmd(a: &DistinguishArgs, seed: u64) -> CliResult<Output> {
    let m = mode(a.mode, a.big_k);
    let rng = RngStream::new(seed, 0);
    let reports = match a.pair {
        PairKind::RandomPure => random_pair_experiment(a.n, a.pairs, m, a.trials, rng)?,
        PairKind::OrthogonalPure => {
            if a.n < 2 {
                return Err(UsageError("orthogonal-pure needs n >= 2".into()));
            }
            let s0 = DensityMatrix::from_pure(&basis_state(a.n, 0))?;
            let s1 = DensityMatrix::from_pure(&basis_state(a.n, 1))?;
            vec![frobenius_tv_experiment(&s0, &s1, m, a.trials, rng)?]
        }
        PairKind::Mixed => {
            let (s0, s1) = concentration::orthogonal_mixed_pair(a.n, a.r)?;
            vec![frobenius_tv_experiment(&s0, &s1, m, a.trials, rng)?]
        }
    };
    let mut rows = Vec::new();
    for (p, r) in reports.iter().enumerate() {
        for t in &r.records {
            rows.push(vec![p.to_string(), t.trial.to_string(), num(t.tv), num(r.frobenius), num(t.ratio)]);
        }
    }
    let vectors = vector_count(m, a.n);
    let (rule, pass) = match a.pair {
        PairKind::Mixed => {
            let bound = concentration::HIGH_RANK_CONSTANT * (a.r as f64).powf(-0.25);
            let med = reports[0].median_tv;
            (json!({"rule": "median_tv <= C1 r^(-1/4)", "bound": bound, "value": med}), (a.r > 1).then_some(med <= bound))
        }
        _ => {
            let c = 0.05 / (vectors as f64).log2().max(1.0);
            let hits: usize = reports.iter().map(|r| r.records.iter().filter(|t| t.ratio >= c).count()).sum();
            let total: usize = reports.iter().map(|r| r.records.len()).sum();
            let frac = hits as f64 / total as f64;
            (json!({"rule": "fraction(tv >= 0.05 f / log2 m) >= 0.95", "threshold": c, "value": frac}), Some(frac >= 0.95))
        }
    };
    let summary = json!({
        "mode": m.to_string(),
        "vectors": vectors,
        "pairs": reports.iter().map(pair_summary).collect::<Vec<_>>(),
        "acceptance": rule,
    });
    Ok(Output {
        header: ["pair", "trial", "tv", "frobenius", "ratio"].map(String::from).to_vec(),
        rows,
        pass,
        summary,
    })
}

fn hsp_cmd(a: &HspArgs, seed: u64) -> CliResult<Output> {
    let reps = parse_group(&a.group)?;
    let ctx = HspContext::new(reps.group().clone())?;
    let rng = RngStream::new(seed, 0);
    let ranks: Vec<Value> = ctx
        .subgroups()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let r = ctx.reps().projector_ranks(h);
            json!({"subgroup": i, "max_rank": r.iter().max(), "ranks": r})
        })
        .collect();
    if a.trace_check {
        let r = ctx.trace_distance_check()?;
        let pass = r.min_trace_distance >= 1.0 - 1e-8 && r.max_hat_defect <= 1e-9;
        let rows = r
            .pairs
            .iter()
            .map(|p| vec![p.h1.to_string(), p.h2.to_string(), num(p.trace_distance), num(p.hat_trace_norm), num(p.hat_expected)])
            .collect();
        return Ok(Output {
            header: ["h1", "h2", "trace_distance", "hat_trace_norm", "hat_expected"].map(String::from).to_vec(),
            rows,
            pass: Some(pass),
            summary: json!({"group": r.group, "subgroups": r.subgroups, "min_trace_distance": r.min_trace_distance, "max_hat_defect": r.max_hat_defect}),
        });
    }
    if a.spectrum {
        let s = ctx.tv_spectrum(a.big_c, a.draws, rng)?;
        let rows = s
            .records
            .iter()
            .map(|x| vec![x.draw.to_string(), x.h1.to_string(), x.h2.to_string(), num(x.tv), num(x.r), num(x.ratio)])
            .collect();
        return Ok(Output {
            header: ["draw", "h1", "h2", "tv", "r", "ratio"].map(String::from).to_vec(),
            rows,
            pass: Some(s.min_ratio > 0.0),
            summary: json!({
                "group": s.group,
                "draws": s.draws,
                "min_ratio": s.min_ratio,
                "fraction_tv_at_least_005_r": s.fraction_at_least_005,
                "block_ranks": ranks,
            }),
        });
    }
    let r = ctx.success_experiment(a.copies, a.runs, a.big_c, rng)?;
    let w = ctx.distinct_core_w()?;
    let min_w = w.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    let pass = r.min_rate >= 0.75 && w.iter().all(|x| x.2 >= 0.5);
    let rows = r
        .per_subgroup
        .iter()
        .map(|s| vec![s.index.to_string(), s.label.clone(), s.order.to_string(), s.successes.to_string(), s.runs.to_string(), num(s.rate)])
        .collect();
    Ok(Output {
        header: ["subgroup", "label", "order", "successes", "runs", "rate"].map(String::from).to_vec(),
        rows,
        pass: Some(pass),
        summary: json!({
            "report": r,
            "distinct_core_pairs": w.len(),
            "min_w_distinct_cores": if w.is_empty() { Value::Null } else { json!(min_w) },
            "block_ranks": ranks,
        }),
    })
}

fn identify_cmd(a: &IdentifyArgs, seed: u64) -> CliResult<Output> {
    let rng = RngStream::new(seed, 0);
    let ensemble = if a.rank == 1 {
        random_pure_ensemble(a.n, a.k, rng.substream(0))?
    } else {
        random_mixed_ensemble(a.n, a.rank, a.k, rng.substream(0))?
    };
    let rule = match (a.copies, a.surrogate) {
        (Some(t), _) => CopyRule::Fixed { t },
        (None, true) => CopyRule::FrobeniusSurrogate { c: a.c_cal },
        (None, false) => CopyRule::Measured { c: a.c_cal },
    };
    let r = identification_experiment(&ensemble, mode(a.mode, a.big_k), rule, a.runs, rng.substream(1))?;
    let rows = r
        .per_state
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), s.name.clone(), s.successes.to_string(), s.runs.to_string(), num(s.rate)])
        .collect();
    Ok(Output {
        header: ["state", "name", "successes", "runs", "rate"].map(String::from).to_vec(),
        rows,
        pass: Some(r.min_rate >= 0.75),
        summary: serde_json::to_value(&r)?,
    })
}

fn group_info_cmd(a: &GroupInfoArgs) -> CliResult<Output> {
    let reps = parse_group(&a.group)?;
    let g = reps.group();
    let subs = enumerate_subgroups(g);
    let index_of = |h: &randpovm::group::Subgroup| subs.iter().position(|s| s == h);
    let subgroup_info: Vec<Value> = subs
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let contained_in: Vec<usize> =
                subs.iter().enumerate().filter(|(j, k)| *j != i && h.is_subset_of(k)).map(|(j, _)| j).collect();
            json!({
                "index": i,
                "order": h.order(),
                "elements": h.label(g),
                "normal": h.is_normal(g),
                "normal_core": index_of(&normal_core(g, h)),
                "contained_in": contained_in,
                "ranks": reps.projector_ranks(h),
            })
        })
        .collect();
    let mut rows = Vec::new();
    let n = subs.len();
    let mut w_table = vec![vec![0.0; n]; n];
    let mut r_table = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            w_table[i][j] = reps.w_distance(&subs[i], &subs[j])?;
            r_table[i][j] = if g.order() >= 2 { reps.r_distance(&subs[i], &subs[j])? } else { 0.0 };
            rows.push(vec![i.to_string(), j.to_string(), num(w_table[i][j]), num(r_table[i][j])]);
        }
    }
    let summary = json!({
        "group": g.family().to_string(),
        "order": g.order(),
        "abelian": g.is_abelian(),
        "irreps": reps.irreps().iter().map(|r| json!({"label": r.label(), "dim": r.dim()})).collect::<Vec<_>>(),
        "subgroups": subgroup_info,
        "w": w_table,
        "r": r_table,
        "r_log_base": 2,
    });
    Ok(Output { header: ["h1", "h2", "w", "r"].map(String::from).to_vec(), rows, pass: None, summary })
}
