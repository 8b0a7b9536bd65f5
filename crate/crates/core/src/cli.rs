//! Command-line front end.
//!
//! Exit codes: 0 pass, 2 principled failure (a principle not satisfied, or
//! a fallacy found), 1 operational error (unreadable or inconsistent input,
//! bad flags).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dsl::parse_plans;
use crate::fallacy::{lint_argument, Argument, LintVerdict};
use crate::hybrid::{run_hybrid, HybridInput, HybridReport};
use crate::mimesis::{borda_count, check_threshold, lint_aggregation_argument, Poll, PreferenceProfile};
use crate::model::{ActionPlan, AgentId, Scenario};
use crate::principles::{evaluate_all, AutonomyContext, EthicsReport, PrincipleSet};
use crate::utility::UtilityMatrix;
use crate::welfare::{plan_scores, select_plan, PlanScore, SelectionRule};

pub const PASS: u8 = 0;
pub const ERROR: u8 = 1;
pub const FAIL: u8 = 2;

const EXIT_CODES: &str = "Exit codes:\n  0  all selected principles satisfied / no fallacy\n  2  a principle is not satisfied, or a fallacy was found\n  1  input or usage error";

#[derive(Debug, Parser)]
#[command(name = "valign", version, about = "Check action plans against anchored ethical principles", after_help = EXIT_CODES)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Agent whose plans are evaluated and whose beliefs polls update.
    #[arg(long, global = true)]
    actor: Option<String>,
    /// Share a poll answer must strictly exceed to count as established.
    #[arg(long, global = true, default_value_t = crate::mimesis::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Principle {
    Gen,
    Auto,
    Util,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    MaximinLex,
    UtilityOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConclusionKind {
    Normative,
    Descriptive,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Principles to evaluate.
    #[arg(long, value_enum, default_value_t = Principle::All)]
    principle: Principle,
    /// Autonomy context (JSON): ethical flags, interferences, consent.
    #[arg(long)]
    autonomy: Option<PathBuf>,
    /// Utility matrix (CSV): rows are plans, columns are agents.
    #[arg(long)]
    utilities: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lint an argument (JSON) for the naturalistic fallacy.
    Lint { argument: PathBuf },
    /// Evaluate the plans in a .plan file against a scenario.
    Check {
        plans: PathBuf,
        scenario: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Narrow the actor's beliefs with a poll, then evaluate.
    Hybrid {
        plans: PathBuf,
        scenario: PathBuf,
        poll: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Borda-count a ballot CSV.
    Aggregate {
        ballots: PathBuf,
        /// Also lint the argument from the outcome to this kind of conclusion.
        #[arg(long, value_enum)]
        lint: Option<ConclusionKind>,
        /// Include the premise that the top-scoring option is the right one.
        #[arg(long, requires = "lint")]
        bridge_premise: bool,
    },
    /// Select a plan from a utility matrix.
    Select {
        utilities: PathBuf,
        /// Candidate plans in tie-break order; defaults to every row.
        #[arg(long, value_delimiter = ',')]
        plans: Vec<String>,
        #[arg(long, value_enum, default_value_t = Rule::MaximinLex)]
        rule: Rule,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ERROR } else { PASS };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((code, text)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            ERROR
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn render<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(),
    }
}

fn dispatch(cli: &Cli) -> Result<(u8, String)> {
    let threshold = check_threshold(cli.threshold)?;
    match &cli.command {
        Command::Lint { argument } => cmd_lint(cli.format, argument),
        Command::Check {
            plans,
            scenario,
            eval,
        } => cmd_check(cli, plans, scenario, eval),
        Command::Hybrid {
            plans,
            scenario,
            poll,
            eval,
        } => cmd_hybrid(cli, plans, scenario, poll, eval, threshold),
        Command::Aggregate {
            ballots,
            lint,
            bridge_premise,
        } => cmd_aggregate(cli.format, ballots, *lint, *bridge_premise),
        Command::Select {
            utilities,
            plans,
            rule,
        } => cmd_select(cli.format, utilities, plans, *rule),
    }
}

#[derive(Serialize)]
struct LintOutput {
    verdict: LintVerdict,
    clause: &'static str,
}

fn cmd_lint(format: Format, path: &Path) -> Result<(u8, String)> {
    let arg = Argument::from_json(&read(path)?).with_context(|| path.display().to_string())?;
    let verdict = lint_argument(&arg)?;
    let output = LintOutput {
        verdict,
        clause: verdict.clause(),
    };
    let text = render(format, &output, || {
        format!("verdict: {verdict}\nclause: {}\n", verdict.clause())
    });
    let code = if verdict.is_clean() { PASS } else { FAIL };
    Ok((code, text))
}

struct Loaded {
    plans: Vec<ActionPlan>,
    scenario: Scenario,
    actor: AgentId,
    autonomy: AutonomyContext,
    utilities: Option<UtilityMatrix>,
    principles: PrincipleSet,
}

fn load(cli: &Cli, plans: &Path, scenario: &Path, eval: &EvalArgs) -> Result<Loaded> {
    let plan_set =
        parse_plans(&read(plans)?).map_err(|e| anyhow!("{}:{e}", plans.display()))?;
    let scenario = Scenario::from_json(&read(scenario)?)
        .with_context(|| scenario.display().to_string())?;
    let actor = cli
        .actor
        .as_deref()
        .ok_or_else(|| anyhow!("--actor is required"))?;
    let actor = scenario.agent(actor)?.clone();
    let names = plan_set.iter().map(|p| p.name());
    let autonomy = match &eval.autonomy {
        Some(path) => AutonomyContext::from_json(&read(path)?)
            .with_context(|| path.display().to_string())?
            .declare_missing(names),
        None => AutonomyContext::unconstrained(names),
    };
    let utilities = eval
        .utilities
        .as_deref()
        .map(|path| -> Result<UtilityMatrix> {
            UtilityMatrix::from_csv(&read(path)?).with_context(|| path.display().to_string())
        })
        .transpose()?;
    let principles = match eval.principle {
        Principle::Gen => PrincipleSet::only("gen")?,
        Principle::Auto => PrincipleSet::only("auto")?,
        Principle::Util => PrincipleSet::only("util")?,
        Principle::All => PrincipleSet::ALL,
    };
    Ok(Loaded {
        plans: plan_set,
        scenario,
        actor,
        autonomy,
        utilities,
        principles,
    })
}

fn report_text(report: &EthicsReport, buf: &mut String) {
    let _ = writeln!(buf, "actor: {}", report.actor);
    for plan in &report.plans {
        let _ = writeln!(buf, "plan {}: {}", plan.plan, plan.overall);
        for (name, verdict) in plan.verdicts() {
            let witness = verdict
                .witness()
                .map(|w| format!(" [witness {w}]"))
                .unwrap_or_default();
            let _ = writeln!(
                buf,
                "  {name}: {}{witness}: {}",
                verdict.status(),
                verdict.explanation()
            );
        }
    }
}

fn report_code(report: &EthicsReport) -> u8 {
    if report.all_ethical() {
        PASS
    } else {
        FAIL
    }
}

fn cmd_check(cli: &Cli, plans: &Path, scenario: &Path, eval: &EvalArgs) -> Result<(u8, String)> {
    let l = load(cli, plans, scenario, eval)?;
    let report = evaluate_all(
        &l.plans,
        &l.scenario,
        &l.actor,
        &l.autonomy,
        l.utilities.as_ref(),
        l.principles,
    )?;
    let text = render(cli.format, &report, || {
        let mut buf = String::new();
        report_text(&report, &mut buf);
        buf
    });
    Ok((report_code(&report), text))
}

fn cmd_hybrid(
    cli: &Cli,
    plans: &Path,
    scenario: &Path,
    poll: &Path,
    eval: &EvalArgs,
    threshold: f64,
) -> Result<(u8, String)> {
    let l = load(cli, plans, scenario, eval)?;
    let poll_doc = Poll::from_json(&read(poll)?).with_context(|| poll.display().to_string())?;
    let report: HybridReport = run_hybrid(&HybridInput {
        plans: &l.plans,
        scenario: &l.scenario,
        actor: &l.actor,
        poll: &poll_doc,
        threshold,
        autonomy: &l.autonomy,
        utilities: l.utilities.as_ref(),
        principles: l.principles,
    })?;
    let text = render(cli.format, &report, || {
        let mut buf = String::new();
        let p = &report.premise;
        let _ = writeln!(
            buf,
            "premise {}: {} (yes {}, no {}, threshold {})",
            p.proposition, p.estimate, p.yes, p.no, p.threshold
        );
        let list = |ws: &[crate::model::WorldId]| {
            ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
        };
        let d = &report.belief_delta;
        let _ = writeln!(buf, "beliefs of {} kept: [{}]", d.actor, list(&d.kept));
        let _ = writeln!(buf, "beliefs of {} removed: [{}]", d.actor, list(&d.removed));
        if let Some(w) = &d.warning {
            let _ = writeln!(buf, "warning: {w}");
        }
        report_text(&report.report, &mut buf);
        buf
    });
    Ok((report_code(&report.report), text))
}

#[derive(Serialize)]
struct AggregateOutput {
    #[serde(flatten)]
    result: crate::mimesis::BordaResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    lint: Option<crate::mimesis::AggregationLint>,
}

fn cmd_aggregate(
    format: Format,
    path: &Path,
    lint: Option<ConclusionKind>,
    bridge_premise: bool,
) -> Result<(u8, String)> {
    let profile =
        PreferenceProfile::from_csv(&read(path)?).with_context(|| path.display().to_string())?;
    let result = borda_count(&profile);
    let lint = lint.map(|kind| {
        lint_aggregation_argument(&result, bridge_premise, kind == ConclusionKind::Normative)
    });
    let code = match &lint {
        Some(l) if !l.verdict.is_clean() => FAIL,
        _ => PASS,
    };
    let output = AggregateOutput { result, lint };
    let text = render(format, &output, || {
        let mut buf = String::new();
        for s in &output.result.scores {
            let _ = writeln!(buf, "{}: {}", s.candidate, s.score);
        }
        let top = output.result.scores.iter().map(|s| s.score).max().unwrap_or(0);
        let label = if output.result.winners.len() == 1 {
            "winner"
        } else {
            "winners"
        };
        let _ = writeln!(buf, "{label}: {} ({top})", output.result.winners.join(", "));
        if let Some(l) = &output.lint {
            let _ = writeln!(buf, "lint: {}", l.verdict);
            let _ = writeln!(buf, "clause: {}", l.verdict.clause());
            if let Some(c) = l.caveat {
                let _ = writeln!(buf, "caveat: {c}");
            }
        }
        buf
    });
    Ok((code, text))
}

#[derive(Serialize)]
struct SelectOutput {
    rule: SelectionRule,
    scores: Vec<PlanScore>,
    selected: String,
}

fn cmd_select(format: Format, path: &Path, plans: &[String], rule: Rule) -> Result<(u8, String)> {
    let util =
        UtilityMatrix::from_csv(&read(path)?).with_context(|| path.display().to_string())?;
    let plans = if plans.is_empty() {
        util.plans().to_vec()
    } else {
        plans.to_vec()
    };
    let rule = match rule {
        Rule::MaximinLex => SelectionRule::MaximinLex,
        Rule::UtilityOnly => SelectionRule::UtilityOnly,
    };
    let selected = select_plan(&plans, &util, rule)?;
    let output = SelectOutput {
        rule,
        scores: plan_scores(&plans, &util)?,
        selected,
    };
    let text = render(format, &output, || {
        let mut buf = String::new();
        let _ = writeln!(buf, "rule: {}", output.rule);
        for s in &output.scores {
            let _ = writeln!(buf, "{}: min {} total {}", s.plan, s.minimum, s.total);
        }
        let _ = writeln!(buf, "selected: {}", output.selected);
        buf
    });
    Ok((PASS, text))
}
