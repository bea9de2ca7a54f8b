//! `bkctl`: lengths, sweeps, worked examples and the verification suite from the
//! command line.
//!
//! Exit codes: 0 pass, 1 counterexample or failed check, 2 usage or input error,
//! 3 precision or budget exhausted.

mod report;
mod spec;

/// `println!` that ignores a closed stdout, so piping into `head` keeps the exit code.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

use std::path::PathBuf;
use std::process::ExitCode;

use bk_core::conjectures::{self, derive_constants, ReportRow, SweepConfig, Verdict};
use bk_core::verify::{self, Level};
use bk_core::{lengths, oracle, BKModule, Error};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{Format, Report};
use spec::SpecDocument;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) if is_resource(e) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn is_resource(e: &Error) -> bool {
    matches!(
        e,
        Error::InsufficientPrecision { .. } | Error::BudgetExceeded { .. } | Error::SearchInconclusive(_)
    )
}

#[derive(Parser)]
#[command(
    name = "bkctl",
    version,
    about = "Lengths and conjecture checks for Breuil-Kisin modules"
)]
struct Cli {
    /// JSON spec document (format_version 1).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Report file. sweep-beta writes both `.csv` and `.json` next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sweeps and suites; defaults to the number of processors.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Oracle enumeration budget in elements; BKCTL_BUDGET is used when absent.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Largest twist index.
    #[arg(long, global = true)]
    n_max: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// E-torsion and p^inf mod-E lengths of a module, fast path against oracle.
    Lengths {
        /// Module name in the spec.
        module: String,
    },
    /// Exhaustive Conjecture-beta sweep over cyclic sums.
    SweepBeta {
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        #[arg(long)]
        height: Option<u32>,
        #[arg(long)]
        max_summands: Option<usize>,
        #[arg(long)]
        r_max: Option<u64>,
        /// Profiles run to n = a + n_extra.
        #[arg(long)]
        n_extra: Option<u32>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Worked examples with their verdicts.
    Example {
        name: ExampleName,
        p: u64,
        /// Ramification degree for bk-group-scheme and p-torsion.
        #[arg(long, default_value_t = 4)]
        e: u64,
        /// Torsion exponents over W for p-torsion.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 1])]
        a: Vec<u64>,
        /// Torsion exponents over O_K for p-torsion.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4])]
        b: Vec<u64>,
    },
    /// Main inequality, stability and Q-length checks on a ledger from the spec.
    Ledger { name: String },
    /// Invariant and cross-check suites.
    Verify {
        level: LevelArg,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    LiPetrov,
    BkGroupScheme,
    PTorsion,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Lengths { module } => cmd_lengths(cli, module),
        Command::SweepBeta {
            primes,
            height,
            max_summands,
            r_max,
            n_extra,
            inject_fault,
        } => {
            let mut config = match &cli.spec {
                Some(path) => SpecDocument::load(path)?.sweep.unwrap_or_default(),
                None => SweepConfig::default(),
            };
            if let Some(v) = primes {
                config.primes = v.clone();
            }
            if let Some(v) = height {
                config.height = *v;
            }
            if let Some(v) = max_summands {
                config.max_summands = *v;
            }
            if let Some(v) = r_max {
                config.r_max = *v;
            }
            if let Some(v) = n_extra {
                config.n_extra = *v;
            }
            config.budget = budget(cli);
            config.inject_violation |= *inject_fault;
            cmd_sweep_beta(cli, &config)
        }
        Command::Example { name, p, e, a, b } => cmd_example(cli, *name, *p, *e, a, b),
        Command::Ledger { name } => cmd_ledger(cli, name),
        Command::Verify { level, inject_fault } => {
            let level = match level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            cmd_verify(cli, level, *inject_fault)
        }
    }
}

fn budget(cli: &Cli) -> u64 {
    cli.budget.unwrap_or_else(oracle::budget_from_env)
}

fn load_spec(cli: &Cli) -> Result<SpecDocument, CliError> {
    let path = cli
        .spec
        .as_ref()
        .ok_or_else(|| CliError::Input("this command needs --spec FILE".into()))?;
    SpecDocument::load(path)
}

fn write_report<S: Serialize>(
    cli: &Cli,
    command: &str,
    summary: &S,
    rows: &[ReportRow],
) -> Result<(), CliError> {
    if let Some(path) = &cli.out {
        Report {
            command,
            summary,
            rows,
        }
        .write(path, cli.format)?;
    }
    Ok(())
}

fn verdict_of(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn exit_for(rows: &[ReportRow]) -> u8 {
    if rows.iter().any(|r| r.verdict == Verdict::Fail) {
        1
    } else {
        0
    }
}

fn show(v: &Option<u64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// A fast-path length, or `None` where no closed form covers the module.
fn formula(r: bk_core::Result<u64>) -> Result<Option<u64>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UnsupportedSummand(_) | Error::MixedPPower(_) | Error::HypothesisUnmet(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn cmd_lengths(cli: &Cli, name: &str) -> Result<u8, CliError> {
    let doc = load_spec(cli)?;
    let m: BKModule = doc.module(name)?;
    let e = doc.eisenstein()?;
    let budget = budget(cli);
    let n_max = cli.n_max.unwrap_or(2);
    let (p, deg) = (doc.ring.p, e.degree() as u64);

    say!("module {name} = {m}, p = {p}, e = {deg}");
    say!(
        "{:>3}  {:>12} {:>12}  {:>12} {:>12}  agree",
        "n",
        "E-tor fast",
        "E-tor oracle",
        "modE fast",
        "modE oracle"
    );
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let tor_fast = formula(m.e_torsion_length(&e, n))?;
        let tor_oracle = oracle::e_torsion_length(&m, &e, n, budget)?;
        let mod_fast = formula(m.mod_e_length(&e, n, true))?;
        let mod_oracle = oracle::mod_e_length(&m, &e, n, true)?;
        let tor_ok = tor_fast.is_none_or(|v| v == tor_oracle);
        let mod_ok = mod_fast.is_none_or(|v| v == mod_oracle);
        say!(
            "{n:>3}  {:>12} {tor_oracle:>12}  {:>12} {mod_oracle:>12}  {}",
            show(&tor_fast),
            show(&mod_fast),
            if tor_ok && mod_ok { "yes" } else { "NO" }
        );
        for (check, fast, oracle, ok) in [
            ("e-torsion", tor_fast, tor_oracle, tor_ok),
            ("mod-e-p-infty", mod_fast, mod_oracle, mod_ok),
        ] {
            rows.push(ReportRow {
                p,
                e: deg,
                module: name.to_string(),
                n,
                check: check.into(),
                values: format!("formula={}, oracle={oracle}", show(&fast)),
                verdict: verdict_of(ok),
            });
        }
    }
    write_report(cli, "lengths", &(), &rows)?;
    Ok(exit_for(&rows))
}

#[derive(Serialize)]
struct SweepSummary {
    cells: usize,
    violations: usize,
    skipped: usize,
    inconclusive: usize,
    qf_validated: usize,
    qf_alpha_failures: usize,
    pass: bool,
}

fn cmd_sweep_beta(cli: &Cli, config: &SweepConfig) -> Result<u8, CliError> {
    let report = conjectures::sweep_beta(config)?;
    let summary = SweepSummary {
        cells: report.cells,
        violations: report.violations,
        skipped: report.skipped,
        inconclusive: report.inconclusive,
        qf_validated: report.qf_validated,
        qf_alpha_failures: report.qf_alpha_failures,
        pass: report.pass(),
    };
    say!(
        "sweep-beta: {} cells, {} violations, {} skipped(budget), {} inconclusive",
        summary.cells,
        summary.violations,
        summary.skipped,
        summary.inconclusive
    );
    say!(
        "quasi-filtered instances validated: {}, alpha-bound failures: {}",
        summary.qf_validated,
        summary.qf_alpha_failures
    );
    for r in report.rows.iter().filter(|r| r.verdict == Verdict::Fail) {
        say!(
            "counterexample: p={} e={} {} n<={} {}: {}",
            r.p,
            r.e,
            r.module,
            r.n,
            r.check,
            r.values
        );
    }
    let base = cli.out.clone().unwrap_or_else(|| PathBuf::from("sweep-beta"));
    let (csv_path, json_path) = report::both_paths(&base);
    let out = Report {
        command: "sweep-beta",
        summary: &summary,
        rows: &report.rows,
    };
    out.write(&csv_path, Format::Csv)?;
    out.write(&json_path, Format::Json)?;
    say!("reports: {} {}", csv_path.display(), json_path.display());
    Ok(if report.pass() { 0 } else { 1 })
}

fn cmd_example(cli: &Cli, name: ExampleName, p: u64, e: u64, a: &[u64], b: &[u64]) -> Result<u8, CliError> {
    let mut rows = Vec::new();
    match name {
        ExampleName::LiPetrov => {
            let r = conjectures::example_li_petrov(p)?;
            say!("worked example, p = {p}: e = p^4 - p^2 = {}", r.e);
            say!("  degree 2: l_crys = {}, l_dR = {}", r.l2_crys, r.l2_dr);
            say!("  degree 3: l_crys = {}, l_dR = {}", r.l3_crys, r.l3_dr);
            say!(
                "  l2_dR = 2e = e l2_crys, 1 = l3_crys < l3_dR < e l3_crys: {}",
                verdict_of(r.identities_hold)
            );
            for (deg, ineq) in [(2, &r.degree2), (3, &r.degree3)] {
                rows.push(ReportRow {
                    p,
                    e: r.e,
                    module: "li-petrov".into(),
                    n: deg,
                    check: "main-inequality".into(),
                    values: format!("l_crys={}, l_dR={}", ineq.l_crys, ineq.l_dr),
                    verdict: verdict_of(ineq.pass()),
                });
            }
            rows.push(ReportRow {
                p,
                e: r.e,
                module: "li-petrov".into(),
                n: 0,
                check: "identities".into(),
                values: format!("l2_dR={}, l3_dR={}", r.l2_dr, r.l3_dr),
                verdict: verdict_of(r.identities_hold),
            });
            write_report(cli, "example li-petrov", &r, &rows)?;
        }
        ExampleName::BkGroupScheme => {
            let n_extra = cli.n_max.unwrap_or(2);
            let r = conjectures::example_bk_group_scheme(p, e, n_extra)?;
            say!("M = S/(p, u), p = {p}, e = {e}, a = {}", r.constants.a);
            say!("  beta profile f(n) = l(M^(n+1)[E]): {:?}", r.profile.values);
            say!(
                "  f(a) <= e f(0): {}, non-decreasing: {}",
                r.beta.cond1,
                r.beta.cond2
            );
            rows.push(ReportRow {
                p,
                e,
                module: "PUr(1,1)".into(),
                n: r.profile.values.len().saturating_sub(1) as u32,
                check: "beta".into(),
                values: format!("{:?}", r.profile.values),
                verdict: verdict_of(r.beta.pass()),
            });
            write_report(cli, "example bk-group-scheme", &r, &rows)?;
        }
        ExampleName::PTorsion => {
            derive_constants(p, e)?;
            let r = conjectures::p_torsion_bound_check(a, b, e)?;
            say!("p-torsion bound, p = {p}, e = {e}, a = {a:?}, b = {b:?}");
            say!("  l_crys = {}, l_dR = {}", r.l_crys, r.l_dr);
            let show = |v: Option<bool>| v.map_or("n/a".to_string(), |x| verdict_of(x).to_string());
            say!("  l_dR <= e l_crys: {}", show(r.right));
            say!("  l_crys <= l_dR: {}", show(r.left));
            let ok = r.right.unwrap_or(true) && r.left.unwrap_or(true);
            rows.push(ReportRow {
                p,
                e,
                module: format!("a={a:?} b={b:?}"),
                n: 0,
                check: "p-torsion-bound".into(),
                values: format!("l_crys={}, l_dR={}", r.l_crys, r.l_dr),
                verdict: if r.right.is_none() {
                    Verdict::Inconclusive
                } else {
                    verdict_of(ok)
                },
            });
            write_report(cli, "example p-torsion", &r, &rows)?;
        }
    }
    Ok(exit_for(&rows))
}

fn cmd_ledger(cli: &Cli, name: &str) -> Result<u8, CliError> {
    let doc = load_spec(cli)?;
    let ledger = doc.ledger(name)?;
    let e = doc.eisenstein()?.degree() as u64;
    let p = doc.ring.p;
    let consts = derive_constants(p, e)?;
    let mut rows = Vec::new();
    let row = |n: u32, check: &str, values: String, ok: bool| ReportRow {
        p,
        e,
        module: name.to_string(),
        n,
        check: check.into(),
        values,
        verdict: verdict_of(ok),
    };
    say!(
        "ledger {name}, degree {}, p = {p}, e = {e}, a = {}",
        ledger.degree,
        consts.a
    );
    for (n, (&c, &d)) in ledger.l_crys.iter().zip(&ledger.l_dr).enumerate() {
        let ineq = conjectures::main_inequality_check(c, d, e);
        say!(
            "  n = {n}: l_crys = {c}, l_dR = {d}, l_crys <= l_dR <= e l_crys: {}",
            verdict_of(ineq.pass())
        );
        rows.push(row(
            n as u32,
            "main-inequality",
            format!("l_crys={c}, l_dR={d}"),
            ineq.pass(),
        ));
    }
    let stab = conjectures::stability_check(ledger, &consts)?;
    say!(
        "  stability from n = a: equality fails at {:?}, constancy fails at {:?}",
        stab.equality_failures,
        stab.constancy_failures
    );
    rows.push(row(
        consts.a,
        "stability",
        format!(
            "equality_failures={:?}, constancy_failures={:?}",
            stab.equality_failures, stab.constancy_failures
        ),
        stab.pass(),
    ));
    if !ledger.q_lengths.is_empty() {
        let g = conjectures::gamma_report(&ledger.q_lengths, &consts)?;
        let ok = g.a_vs_zero && g.decreases.is_empty();
        say!(
            "  Q-lengths {:?}: l(Q^(a)) >= l(Q^(0)): {}, decreases at {:?}",
            ledger.q_lengths,
            g.a_vs_zero,
            g.decreases
        );
        rows.push(row(consts.a, "q-lengths", format!("{:?}", ledger.q_lengths), ok));
    }
    if let Some((a, b)) = &ledger.torsion_decomps {
        let r = conjectures::p_torsion_bound_check(a, b, e)?;
        let ok = r.right.unwrap_or(true) && r.left.unwrap_or(true);
        say!(
            "  torsion exponents a = {a:?}, b = {b:?}: right {:?}, left {:?}",
            r.right,
            r.left
        );
        rows.push(row(0, "p-torsion-bound", format!("a={a:?}, b={b:?}"), ok));
    }
    write_report(cli, "ledger", &(), &rows)?;
    Ok(exit_for(&rows))
}

fn cmd_verify(cli: &Cli, level: Level, inject_fault: bool) -> Result<u8, CliError> {
    lengths::inject_fault(inject_fault);
    let summary = verify::run(level)?;
    say!("{summary}");
    let rows: Vec<ReportRow> = summary
        .checks
        .iter()
        .map(|c| ReportRow {
            p: 0,
            e: 0,
            module: String::new(),
            n: 0,
            check: c.name.to_string(),
            values: format!("cases={}, failures={}", c.cases, c.failures.len()),
            verdict: verdict_of(c.pass()),
        })
        .collect();
    write_report(cli, "verify", &(), &rows)?;
    Ok(if summary.pass() { 0 } else { 1 })
}
