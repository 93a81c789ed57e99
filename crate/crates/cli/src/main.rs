//! Command line frontend for the heptagrid railway automaton.
//!
//! Five subcommands: `audit` checks a rule file, `simulate` steps a scenario
//! and prints the trace, `render` draws one as SVG, `elicit` fills rule gaps
//! interactively or from a script, and `scenario-list` names the layouts a
//! scenario file may ask for.
//!
//! Exit codes: 0 success, 1 parse errors and rule conflicts, 2 missing
//! rules, 3 rim contact, 4 I/O and resource limits.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use heptaca_core::ca::{format_trace, run, Configuration, FailureKind, RuleTable, State};
use heptaca_core::grid::{GridError, Orientation, Region};
use heptaca_core::railway::{build_scenario, parse_scenario, scenario_kinds, Scenario};
use heptaca_core::render::{render_svg, RenderStyle};
use heptaca_core::toolkit::{audit, elicit, AnswerSource, ElicitError, Prompt, ScriptedAnswers};

/// Environment variable capping the number of cells a region may hold.
const MAX_CELLS_VAR: &str = "HEPTACA_MAX_CELLS";

#[derive(Parser)]
#[command(name = "heptaca", version, about = "Heptagrid cellular-automaton toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a rule file for conflicts and report its size
    Audit {
        /// Rule file, one rule per line: 9 states, context then result
        #[arg(long)]
        rules: PathBuf,
    },
    /// Step a scenario under a rule table and print the whole trace
    Simulate {
        #[arg(long)]
        rules: PathBuf,
        /// Scenario file of key=value lines; see scenario-list
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Region depth in levels
        #[arg(long, default_value_t = 6)]
        level: u32,
        /// Write the trace here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a scenario as an SVG picture of the Poincaré disc
    Render {
        #[arg(long)]
        scenario: PathBuf,
        /// Step the scenario this many times before drawing (needs --rules)
        #[arg(long, default_value_t = 0)]
        steps: usize,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        level: u32,
        /// Style preset: default or plain
        #[arg(long, default_value = "default")]
        style: String,
        /// Write the SVG here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Step a scenario and prompt for every rule the table lacks
    Elicit {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 6)]
        level: u32,
        /// Answer file, one state letter per line, instead of prompting
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Append the accepted rules to the rules file
        #[arg(long)]
        append: bool,
    },
    /// List the scenario kinds with one-line descriptions
    ScenarioList,
}

/// An error carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }

    fn io(context: &str, err: io::Error) -> Failure {
        Failure::new(4, format!("{context}: {err}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version are not failures
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Audit { rules } => cmd_audit(&rules),
        Command::Simulate { rules, scenario, steps, level, out } => {
            cmd_simulate(&rules, &scenario, steps, level, out.as_deref())
        }
        Command::Render { scenario, steps, rules, level, style, out } => {
            cmd_render(&scenario, steps, rules.as_deref(), level, &style, out.as_deref())
        }
        Command::Elicit { rules, scenario, steps, level, answers, append } => {
            cmd_elicit(&rules, &scenario, steps, level, answers.as_deref(), append)
        }
        Command::ScenarioList => cmd_scenario_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(&path.display().to_string(), e))
}

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(&path.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_region(level: u32) -> Result<Region, Failure> {
    let max_cells = match std::env::var(MAX_CELLS_VAR) {
        Ok(text) => Some(text.parse::<u64>().map_err(|_| {
            Failure::new(4, format!("{MAX_CELLS_VAR} must be a cell count, got {text:?}"))
        })?),
        Err(_) => None,
    };
    Region::build_oriented(level, Orientation::Standard, max_cells).map_err(|e| match e {
        GridError::TooManyCells { .. } => Failure::new(4, e.to_string()),
        GridError::LevelTooDeep(_) => Failure::new(1, e.to_string()),
    })
}

fn load_table(path: &Path) -> Result<RuleTable, Failure> {
    RuleTable::parse(&read_file(path)?).map_err(|e| Failure::new(1, e.to_string()))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    parse_scenario(&read_file(path)?).map_err(|e| Failure::new(1, e.to_string()))
}

fn realize(region: &Region, scenario: &Scenario) -> Result<(Configuration, Vec<String>), Failure> {
    let build = build_scenario(region, scenario).map_err(|e| Failure::new(1, e.to_string()))?;
    Ok((build.config, build.report))
}

fn cmd_audit(rules: &Path) -> Outcome {
    let text = read_file(rules)?;
    let entries = heptaca_core::ca::parse_rule_lines(&text)
        .map_err(|e| Failure::new(1, e.to_string()))?;
    let report = audit(&entries);
    println!("{}", report.summary_line());
    for repeat in &report.repeats {
        println!(
            "repeat: line {} restates line {}: {}",
            repeat.line, repeat.first_line, repeat.rule
        );
    }
    for conflict in &report.conflicts {
        println!("conflict: {conflict}");
    }
    if report.conflicts.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(1, format!("{} conflicting rule pair(s)", report.conflicts.len())))
    }
}

fn run_failure(err: heptaca_core::ca::RunFailure) -> Failure {
    match &err.kind {
        FailureKind::Missing(missing) => {
            let mut message = format!(
                "step {} is not covered: {} missing class(es)",
                err.at_step,
                missing.len()
            );
            for m in missing {
                let _ = write!(message, "\n  {m}");
            }
            Failure::new(2, message)
        }
        FailureKind::RimContact(cells) => {
            let names: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
            Failure::new(
                3,
                format!("configuration {} touches the rim at {}", err.at_step, names.join(" ")),
            )
        }
    }
}

fn cmd_simulate(
    rules: &Path,
    scenario: &Path,
    steps: usize,
    level: u32,
    out: Option<&Path>,
) -> Outcome {
    let table = load_table(rules)?;
    let scenario = load_scenario(scenario)?;
    let region = build_region(level)?;
    let (config, report) = realize(&region, &scenario)?;
    for line in &report {
        eprintln!("note: {line}");
    }
    let trace = run(&region, &config, &table, steps).map_err(run_failure)?;
    write_output(out, &format_trace(&region, &trace))
}

fn cmd_render(
    scenario: &Path,
    steps: usize,
    rules: Option<&Path>,
    level: u32,
    style: &str,
    out: Option<&Path>,
) -> Outcome {
    let style = RenderStyle::preset(style)
        .ok_or_else(|| Failure::new(1, format!("unknown style {style:?}, expected default or plain")))?;
    let scenario = load_scenario(scenario)?;
    let region = build_region(level)?;
    let (mut config, report) = realize(&region, &scenario)?;
    for line in &report {
        eprintln!("note: {line}");
    }
    if steps > 0 {
        let rules = rules.ok_or_else(|| Failure::new(1, "--steps needs --rules"))?;
        let table = load_table(rules)?;
        let trace = run(&region, &config, &table, steps).map_err(run_failure)?;
        config = trace.last().unwrap().clone();
    }
    write_output(out, &render_svg(&region, &config, &style))
}

/// Prompts on stderr and reads one state letter per line from stdin.
struct InteractiveAnswers<R: BufRead> {
    input: R,
}

impl<R: BufRead> AnswerSource for InteractiveAnswers<R> {
    fn answer(&mut self, prompt: &Prompt) -> Option<State> {
        loop {
            eprint!("{prompt} ");
            let _ = io::stderr().flush();
            let mut line = String::new();
            if self.input.read_line(&mut line).ok()? == 0 {
                return None;
            }
            match line.trim().parse::<State>() {
                Ok(state) => return Some(state),
                Err(e) => eprintln!("{e}"),
            }
        }
    }
}

fn cmd_elicit(
    rules: &Path,
    scenario: &Path,
    steps: usize,
    level: u32,
    answers: Option<&Path>,
    append: bool,
) -> Outcome {
    let table = load_table(rules)?;
    let scenario_text = load_scenario(scenario)?;
    let region = build_region(level)?;
    let (config, report) = realize(&region, &scenario_text)?;
    for line in &report {
        eprintln!("note: {line}");
    }
    let outcome = match answers {
        Some(path) => {
            let mut script = ScriptedAnswers::from_text(&read_file(path)?)
                .map_err(|e| Failure::new(1, e.to_string()))?;
            let outcome = elicit(&region, &config, &table, steps, &mut script);
            if let (Ok(_), n) = (&outcome, script.remaining()) {
                if n > 0 {
                    eprintln!("note: {n} scripted answer(s) unused");
                }
            }
            outcome
        }
        None => {
            let mut interactive = InteractiveAnswers { input: io::stdin().lock() };
            elicit(&region, &config, &table, steps, &mut interactive)
        }
    };
    let outcome = outcome.map_err(|e| match &e {
        ElicitError::Conflict { .. } => Failure::new(1, e.to_string()),
        ElicitError::OutOfAnswers { .. } => Failure::new(2, e.to_string()),
        ElicitError::RimContact { .. } => Failure::new(3, e.to_string()),
    })?;
    if outcome.appended.is_empty() {
        println!("no gaps: the table already covers every step");
        return Ok(());
    }
    println!("accepted {} rule(s):", outcome.appended.len());
    for rule in &outcome.appended {
        println!("{rule}");
    }
    if append {
        let mut block = String::from("\n# accepted during elicitation\n");
        for rule in &outcome.appended {
            let _ = writeln!(block, "{rule}");
        }
        let mut text = read_file(rules)?;
        text.push_str(&block);
        fs::write(rules, text).map_err(|e| Failure::io(&rules.display().to_string(), e))?;
        println!("appended to {}", rules.display());
    }
    Ok(())
}

fn cmd_scenario_list() -> Outcome {
    for (name, description) in scenario_kinds() {
        println!("{name:24} {description}");
    }
    Ok(())
}
