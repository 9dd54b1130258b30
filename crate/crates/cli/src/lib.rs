//! The `tourney` command line. [`run`] parses an argument vector and returns
//! the report together with the exit code:
//! 0 success (property holds, LP feasible), 1 property fails or LP infeasible,
//! 2 bad input or usage.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use tourney::analysis::{
    check_fairness, check_fairness_table, check_monotone, check_monotone_table, check_pnm,
    check_pnm_table, min_lambda, min_lambda_table, worst_alpha, worst_alpha_table,
    ManipulationWitness, MinLambda, Property, PropertyReport, CSV_HEADER,
};
use tourney::bounds::{
    closed_form, cross_check, lambda_alpha_tradeoff, reproduction_rows, BoundRow,
};
use tourney::construct::{construct, Family};
use tourney::lp::{
    build_lp, probe_forced_values, solve_feasibility, verify_rule_table, Budget, LpInstance,
    LpOptions, LpOutcome,
};
use tourney::rational::{parse_q, to_f64};
use tourney::rules::monte_carlo;
use tourney::{evaluate, Error, RuleId, RuleTable, Tournament, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: u8,
    pub report: String,
}

impl CommandResult {
    fn new(holds: bool, report: String) -> Self {
        CommandResult {
            exit_code: if holds { 0 } else { 1 },
            report,
        }
    }

    fn usage(report: String) -> Self {
        CommandResult {
            exit_code: 2,
            report,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
    Io(PathBuf, String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, m) => write!(f, "{}: {m}", p.display()),
        }
    }
}

type CliResult = std::result::Result<CommandResult, CliError>;

#[derive(Parser, Debug)]
#[command(name = "tourney", version, about = "Exact tournament rule analysis")]
struct Cli {
    /// Worker threads for scans (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact winning distribution of a rule on one tournament.
    Eval(EvalArgs),
    /// Seeded simulation of a rule, compared with the exact distribution.
    Mc(McArgs),
    /// Worst 2-NM_λ slack over all tournaments of one size.
    Scan(ScanArgs),
    /// Least λ for which the rule is 2-NM_λ with zero slack.
    MinLambda(SourceArgs),
    /// Fairness properties (CC, TCC, COVER, DSTC).
    Fairness(FairnessArgs),
    /// Monotonicity.
    Monotone(SourceArgs),
    /// 2-PNM.
    Pnm(SourceArgs),
    /// Feasibility of the fair, monotone, 2-NM_λ rule-table LP.
    Lp(LpArgs),
    /// Range of one table entry over the LP's feasible region.
    Probe(ProbeArgs),
    /// Audit a rule table for CC, monotonicity and 2-NM_λ.
    VerifyTable(VerifyArgs),
    /// Print a named tournament.
    Construct(ConstructArgs),
    /// Closed-form bounds next to the exact rule values.
    Bounds(BoundsArgs),
    /// Property matrix, manipulability table and bounds CSV in one go.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct TournamentArgs {
    /// Tournament file, matrix or compact form.
    #[arg(long)]
    tournament: Option<PathBuf>,
    /// Named construction, instead of a file.
    #[arg(long)]
    family: Option<String>,
    /// Size parameter of the construction.
    #[arg(long)]
    param: Option<usize>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    tournament: TournamentArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    tournament: TournamentArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SourceArgs {
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Rule table file, instead of a rule.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value = "0")]
    lambda: String,
}

#[derive(Args, Debug)]
struct FairnessArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Check only this property.
    #[arg(long)]
    property: Option<String>,
}

#[derive(Args, Debug)]
struct LpShape {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    lambda: String,
    /// Average over relabelings: one variable per class and orbit.
    #[arg(long)]
    symmetric: bool,
    /// Drop the monotonicity rows.
    #[arg(long)]
    no_monotone: bool,
    /// Give up after this many seconds.
    #[arg(long)]
    time_limit: Option<u64>,
}

impl LpShape {
    fn build(&self) -> std::result::Result<(LpInstance, Budget), CliError> {
        let lambda = parse_q(&self.lambda)?;
        let lp = build_lp(
            self.n,
            &lambda,
            LpOptions {
                symmetric: self.symmetric,
                monotone: !self.no_monotone,
            },
        )?;
        let budget = Budget {
            deadline: self
                .time_limit
                .map(|s| Instant::now() + Duration::from_secs(s)),
            ..Budget::default()
        };
        Ok((lp, budget))
    }
}

#[derive(Args, Debug)]
struct LpArgs {
    #[command(flatten)]
    shape: LpShape,
    /// Where to write the rule table or the infeasibility certificate.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the LP in CPLEX LP format.
    #[arg(long)]
    export: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[command(flatten)]
    shape: LpShape,
    #[arg(long)]
    tournament: PathBuf,
    /// Agent to probe, 1-based (default: all).
    #[arg(long)]
    param: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    table: PathBuf,
    /// Audit at this λ instead of the one in the table header.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    param: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "0")]
    alpha: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Largest size scanned.
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value = "0")]
    alpha: String,
    /// Bounds CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandResult::usage(text)
            } else {
                CommandResult::new(true, text)
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return CommandResult::usage("error: --threads must be positive\n".into());
        }
        builder = builder.num_threads(k);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => return CommandResult::usage(format!("error: {e}\n")),
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(result) => result,
        Err(e) => CommandResult::usage(format!("error: {e}\n")),
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Eval(a) => cmd_eval(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Scan(a) => cmd_scan(a),
        Command::MinLambda(a) => cmd_min_lambda(a),
        Command::Fairness(a) => cmd_fairness(a),
        Command::Monotone(a) => cmd_single(a, Property::Monotone),
        Command::Pnm(a) => cmd_single(a, Property::Pnm),
        Command::Lp(a) => cmd_lp(a),
        Command::Probe(a) => cmd_probe(a),
        Command::VerifyTable(a) => cmd_verify(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    }
}

fn read(path: &Path) -> std::result::Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))
}

fn write_csv<R>(path: &Path, header: &[&str], rows: R) -> std::result::Result<(), CliError>
where
    R: IntoIterator,
    R::Item: IntoIterator,
    <R::Item as IntoIterator>::Item: AsRef<[u8]>,
{
    let io = |e: csv::Error| CliError::Io(path.to_path_buf(), e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(path.to_path_buf(), e.to_string()))
}

fn rule(name: &str) -> std::result::Result<RuleId, CliError> {
    Ok(name.parse()?)
}

fn family(name: &str) -> std::result::Result<Family, CliError> {
    Ok(name.parse()?)
}

fn load_tournament(a: &TournamentArgs) -> std::result::Result<Tournament, CliError> {
    match (&a.tournament, &a.family) {
        (Some(path), None) => Ok(Tournament::parse(&read(path)?)?),
        (None, Some(name)) => Ok(construct(family(name)?, a.param.unwrap_or(0))?),
        _ => Err(CliError::Usage(
            "give exactly one of --tournament FILE and --family NAME".into(),
        )),
    }
}

enum Source {
    Rule(RuleId, usize),
    Table(RuleTable),
}

impl Source {
    fn from_args(a: &SourceArgs) -> std::result::Result<Self, CliError> {
        match (&a.rule, a.n, &a.table) {
            (Some(r), Some(n), None) => Ok(Source::Rule(rule(r)?, n)),
            (None, None, Some(path)) => Ok(Source::Table(RuleTable::parse(&read(path)?)?)),
            _ => Err(CliError::Usage(
                "give either --rule NAME --n N or --table FILE".into(),
            )),
        }
    }
}

fn witness_line(w: &ManipulationWitness) -> String {
    format!(
        "witness: tournament {} pair ({}, {}) gain_i={} gain_j={} max_loss={} value={}",
        w.tournament,
        w.i + 1,
        w.j + 1,
        w.gain_i,
        w.gain_j,
        w.max_loss,
        w.value
    )
}

fn witness_record(w: Option<&ManipulationWitness>) -> Vec<String> {
    match w {
        None => vec![String::new(); 5],
        Some(w) => vec![
            w.tournament.to_compact(),
            format!("{} {}", w.i + 1, w.j + 1),
            w.gain_i.to_string(),
            w.gain_j.to_string(),
            w.max_loss.to_string(),
        ],
    }
}

fn cmd_eval(a: EvalArgs) -> CliResult {
    let r = rule(&a.rule)?;
    let t = load_tournament(&a.tournament)?;
    let dist = evaluate(r, &t)?;
    if let Some(path) = &a.out {
        write_csv(
            path,
            &["agent", "probability"],
            dist.probs()
                .iter()
                .enumerate()
                .map(|(k, p)| [(k + 1).to_string(), p.to_string()]),
        )?;
    }
    Ok(CommandResult::new(true, format!("{dist}\n")))
}

fn cmd_mc(a: McArgs) -> CliResult {
    let seed = a
        .seed
        .ok_or_else(|| CliError::Usage("mc needs an explicit --seed".into()))?;
    let r = rule(&a.rule)?;
    let t = load_tournament(&a.tournament)?;
    let empirical = monte_carlo(r, &t, a.trials, seed)?;
    let exact = evaluate(r, &t)?;
    let trials = a.trials as f64;
    let mut report = format!("{r} on {t}, {} trials, seed {seed}\n", a.trials);
    let mut within = true;
    let mut rows = Vec::new();
    for k in 0..t.n() {
        let p = to_f64(exact.prob(k));
        let f = to_f64(empirical.prob(k));
        let sigma = (p * (1.0 - p) / trials).sqrt();
        let ok = (f - p).abs() <= 4.0 * sigma + 1e-3;
        within &= ok;
        writeln!(
            report,
            "agent {}: empirical {f:.6} exact {} ({p:.6}) sigma {sigma:.2e}{}",
            k + 1,
            exact.prob(k),
            if ok { "" } else { " OUTSIDE 4 sigma + 1e-3" }
        )
        .unwrap();
        rows.push([
            (k + 1).to_string(),
            empirical.prob(k).to_string(),
            exact.prob(k).to_string(),
            ok.to_string(),
        ]);
    }
    if let Some(path) = &a.out {
        write_csv(path, &["agent", "empirical", "exact", "within"], rows)?;
    }
    Ok(CommandResult::new(within, report))
}

fn cmd_scan(a: ScanArgs) -> CliResult {
    let lambda = parse_q(&a.lambda)?;
    let (label, n, (alpha, w)) = match Source::from_args(&a.source)? {
        Source::Rule(r, n) => (r.to_string(), n, worst_alpha(r, n, &lambda)?),
        Source::Table(t) => ("table".to_string(), t.n(), worst_alpha_table(&t, &lambda)),
    };
    let mut report = format!("alpha = {alpha}\n");
    if let Some(w) = &w {
        writeln!(report, "{}", witness_line(w)).unwrap();
    }
    if let Some(path) = &a.source.out {
        let mut row = vec![label, n.to_string(), lambda.to_string(), alpha.to_string()];
        row.extend(witness_record(w.as_ref()));
        write_csv(
            path,
            &[
                "rule", "n", "lambda", "alpha", "witness", "pair", "gain_i", "gain_j", "max_loss",
            ],
            [row],
        )?;
    }
    Ok(CommandResult::new(true, report))
}

fn cmd_min_lambda(a: SourceArgs) -> CliResult {
    let (label, n, (value, w)) = match Source::from_args(&a)? {
        Source::Rule(r, n) => (r.to_string(), n, min_lambda(r, n)?),
        Source::Table(t) => ("table".to_string(), t.n(), min_lambda_table(&t)),
    };
    let mut report = format!("min_lambda = {value}\n");
    if let Some(w) = &w {
        writeln!(report, "{}", witness_line(w)).unwrap();
    }
    if let Some(path) = &a.out {
        let mut row = vec![label, n.to_string(), value.to_string()];
        row.extend(witness_record(w.as_ref()));
        write_csv(
            path,
            &[
                "rule",
                "n",
                "min_lambda",
                "witness",
                "pair",
                "gain_i",
                "gain_j",
                "max_loss",
            ],
            [row],
        )?;
    }
    Ok(CommandResult::new(true, report))
}

fn finish_reports(reports: Vec<PropertyReport>, out: Option<&Path>) -> CliResult {
    let mut report = String::new();
    for r in &reports {
        writeln!(report, "{r}").unwrap();
    }
    if let Some(path) = out {
        write_csv(path, &CSV_HEADER, reports.iter().map(|r| r.csv_record()))?;
    }
    Ok(CommandResult::new(reports.iter().all(|r| r.holds), report))
}

fn cmd_fairness(a: FairnessArgs) -> CliResult {
    let source = Source::from_args(&a.source)?;
    let properties = match &a.property {
        Some(p) => vec![p.parse::<Property>()?],
        None => match source {
            Source::Rule(..) => vec![Property::Cc, Property::Tcc, Property::Cover, Property::Dstc],
            Source::Table(_) => vec![Property::Cc, Property::Tcc, Property::Cover],
        },
    };
    let reports = properties
        .into_iter()
        .map(|p| match &source {
            Source::Rule(r, n) => check_fairness(*r, *n, p),
            Source::Table(t) => check_fairness_table(t, p),
        })
        .collect::<tourney::Result<Vec<_>>>()?;
    finish_reports(reports, a.source.out.as_deref())
}

fn cmd_single(a: SourceArgs, property: Property) -> CliResult {
    let report = match (Source::from_args(&a)?, property) {
        (Source::Rule(r, n), Property::Monotone) => check_monotone(r, n)?,
        (Source::Table(t), Property::Monotone) => check_monotone_table(&t),
        (Source::Rule(r, n), _) => check_pnm(r, n)?,
        (Source::Table(t), _) => check_pnm_table(&t),
    };
    finish_reports(vec![report], a.out.as_deref())
}

fn cmd_lp(a: LpArgs) -> CliResult {
    let (lp, budget) = a.shape.build()?;
    if let Some(path) = &a.export {
        write(path, &lp.to_lp_format())?;
    }
    let mut report = format!(
        "n={} lambda={} variables={} constraints={}\n",
        a.shape.n,
        a.shape.lambda,
        lp.variables().len(),
        lp.constraints().len()
    );
    match solve_feasibility(&lp, &budget)? {
        LpOutcome::Feasible { table, reports } => {
            report.push_str("FEASIBLE\n");
            for r in &reports {
                writeln!(report, "{r}").unwrap();
            }
            if let Some(path) = &a.out {
                write(path, &table.to_text())?;
            }
            Ok(CommandResult::new(true, report))
        }
        LpOutcome::Infeasible(cert) => {
            report.push_str("INFEASIBLE\n");
            let text = lp.describe_certificate(&cert);
            match &a.out {
                Some(path) => {
                    write(path, &text)?;
                    writeln!(
                        report,
                        "certificate: {} multipliers written to {}",
                        cert.multipliers.len(),
                        path.display()
                    )
                    .unwrap();
                }
                None => report.push_str(&text),
            }
            Ok(CommandResult::new(false, report))
        }
    }
}

fn cmd_probe(a: ProbeArgs) -> CliResult {
    let (lp, budget) = a.shape.build()?;
    let t = Tournament::parse(&read(&a.tournament)?)?;
    if t.n() != a.shape.n {
        return Err(CliError::Usage(format!(
            "tournament has {} agents, --n is {}",
            t.n(),
            a.shape.n
        )));
    }
    let agents: Vec<usize> = match a.param {
        Some(k) if (1..=t.n()).contains(&k) => vec![k - 1],
        Some(k) => return Err(CliError::Usage(format!("agent {k} is out of range"))),
        None => (0..t.n()).collect(),
    };
    let mut report = format!("tournament {t}\n");
    for i in agents {
        match probe_forced_values(&lp, &t, i, &budget) {
            Ok((lo, hi)) => {
                let forced = if lo == hi { " forced" } else { "" };
                writeln!(report, "agent {}: min {lo} max {hi}{forced}", i + 1).unwrap();
            }
            Err(Error::Infeasible) => {
                report.push_str("INFEASIBLE\n");
                return Ok(CommandResult::new(false, report));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(CommandResult::new(true, report))
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let mut table = RuleTable::parse(&read(&a.table)?)?;
    if let Some(l) = &a.lambda {
        table = table.with_lambda(parse_q(l)?);
    }
    let lambda: Q = table.lambda().clone();
    let mut properties = vec![Property::Cc, Property::Monotone, Property::NmLambda];
    if lambda > Q::from_integer(0.into()) {
        properties.push(Property::OneSided);
    }
    let reports = verify_rule_table(&table, &lambda, &properties)?;
    finish_reports(reports, a.out.as_deref())
}

fn cmd_construct(a: ConstructArgs) -> CliResult {
    let t = construct(family(&a.family)?, a.param.unwrap_or(0))?;
    let text = t.to_matrix_string();
    if let Some(path) = &a.out {
        write(path, &text)?;
    }
    Ok(CommandResult::new(true, text))
}

fn bound_rows_report(rows: &[BoundRow], out: Option<&Path>) -> CliResult {
    let mut report = BoundRow::CSV_HEADER.join(",");
    report.push('\n');
    for row in rows {
        report.push_str(&row.csv_record().join(","));
        report.push('\n');
    }
    if let Some(path) = out {
        write_csv(
            path,
            &BoundRow::CSV_HEADER,
            rows.iter().map(|r| r.csv_record()),
        )?;
    }
    Ok(CommandResult::new(
        rows.iter().all(BoundRow::matches),
        report,
    ))
}

fn cmd_bounds(a: BoundsArgs) -> CliResult {
    let alpha = parse_q(&a.alpha)?;
    match (&a.rule, &a.family) {
        (None, None) => bound_rows_report(&reproduction_rows(&alpha)?, a.out.as_deref()),
        (Some(r), Some(f)) => {
            let n =
                a.n.ok_or_else(|| CliError::Usage("bounds with --family needs --n".into()))?;
            let form = closed_form(rule(r)?, family(f)?, n, &alpha)?;
            let mut result = bound_rows_report(&cross_check(&form)?, a.out.as_deref())?;
            let mut head = String::new();
            for (name, value) in &form.quantities {
                writeln!(head, "{name} = {value}").unwrap();
            }
            result.report.insert_str(0, &head);
            Ok(result)
        }
        (Some(r), None) => {
            let n =
                a.n.ok_or_else(|| CliError::Usage("bounds --rule needs --n".into()))?;
            let tradeoff = lambda_alpha_tradeoff(rule(r)?, n, &alpha)?;
            Ok(CommandResult::new(true, format!("{tradeoff}\n")))
        }
        (None, Some(_)) => Err(CliError::Usage("bounds --family needs --rule".into())),
    }
}

const MATRIX_PROPERTIES: [Property; 6] = [
    Property::Monotone,
    Property::Cc,
    Property::Tcc,
    Property::Cover,
    Property::Dstc,
    Property::Pnm,
];

fn cmd_reproduce(a: ReproduceArgs) -> CliResult {
    if !(3..=6).contains(&a.n) {
        return Err(CliError::Usage("reproduce scans 3 <= n <= 6".into()));
    }
    let alpha = parse_q(&a.alpha)?;
    let sizes: Vec<usize> = (3..=a.n).collect();
    let mut report = format!("Properties over all tournaments with 3..={} agents\n", a.n);
    write!(report, "{:<6}", "rule").unwrap();
    for p in MATRIX_PROPERTIES {
        write!(report, " {:<10}", p.name()).unwrap();
    }
    report.push('\n');
    for r in RuleId::ALL {
        write!(report, "{:<6}", r.name()).unwrap();
        for p in MATRIX_PROPERTIES {
            let mut cell = "yes".to_string();
            for &n in &sizes {
                let holds = match p {
                    Property::Monotone => check_monotone(r, n)?.holds,
                    Property::Pnm => check_pnm(r, n)?.holds,
                    _ => check_fairness(r, n, p)?.holds,
                };
                if !holds {
                    cell = format!("no (n={n})");
                    break;
                }
            }
            write!(report, " {cell:<10}").unwrap();
        }
        report.push('\n');
    }

    report.push_str("\nWorst 2-SNM slack (alpha at lambda = 0) and least lambda for 2-NM_lambda\n");
    write!(report, "{:<6}", "rule").unwrap();
    for &n in &sizes {
        write!(report, " {:<12}", format!("alpha n={n}")).unwrap();
    }
    for &n in &sizes {
        write!(report, " {:<12}", format!("lambda n={n}")).unwrap();
    }
    report.push('\n');
    let zero = Q::from_integer(0.into());
    for r in RuleId::ALL {
        write!(report, "{:<6}", r.name()).unwrap();
        for &n in &sizes {
            write!(report, " {:<12}", worst_alpha(r, n, &zero)?.0.to_string()).unwrap();
        }
        for &n in &sizes {
            let value: MinLambda = min_lambda(r, n)?.0;
            write!(report, " {:<12}", value.to_string()).unwrap();
        }
        report.push('\n');
    }

    report.push_str("\nClosed-form bounds\n");
    let bounds = bound_rows_report(&reproduction_rows(&alpha)?, a.out.as_deref())?;
    report.push_str(&bounds.report);
    Ok(CommandResult::new(bounds.exit_code == 0, report))
}
