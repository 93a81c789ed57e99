//! Working tools for rule tables: audits, rotation closure, diffs, and
//! interactive elicitation of missing rules.
//!
//! An audit reads a raw rule listing and reduces it to rotation classes: the
//! raw count, the class count, every agreeing repeat and every conflicting
//! pair, each tied to its source lines. A listing is a well-defined
//! rotation-invariant transition function exactly when the conflict list is
//! empty.
//!
//! Elicitation grows a table against a scenario the way the tables here were
//! originally assembled: run the scenario, and at the first cell whose
//! context has no rule, ask for the outcome, append the answer, and restart
//! from the initial configuration. A session-appended rule only matches its
//! context verbatim, so a rotated recurrence of the same class prompts again;
//! the two answers must agree, and a mismatch stops the session naming both
//! rules. This keeps every appended rule answerable for independently, while
//! the loaded table keeps matching up to rotation as usual.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::ca::{
    context_at, Configuration, Context, ParseStateError, Rule, RuleConflict, RuleTable, State,
};
use crate::grid::{CellId, Region};

/// An entry that repeats an earlier rule of the same rotation class with the
/// same result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Repeat {
    pub rule: Rule,
    pub line: usize,
    /// Line of the entry that first defined the class.
    pub first_line: usize,
}

/// What an audit found in a raw rule listing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// Raw entries read.
    pub raw: usize,
    /// Distinct rotation classes.
    pub minimal: usize,
    /// Pairs that cover the same class with different results.
    pub conflicts: Vec<RuleConflict>,
    /// Entries that restate an earlier rule, rotated or verbatim.
    pub repeats: Vec<Repeat>,
    /// Classes never consulted along a given trace; only present when the
    /// audit was given one.
    pub unreachable: Option<Vec<Rule>>,
}

impl AuditReport {
    /// The listing defines a single-valued rotation-invariant transition
    /// function if and only if this holds.
    pub fn is_conflict_free(&self) -> bool {
        self.conflicts.is_empty()
    }

    /// The one-line machine-readable summary.
    pub fn summary_line(&self) -> String {
        format!(
            "RAW={} MINIMAL={} CONFLICTS={}",
            self.raw,
            self.minimal,
            self.conflicts.len()
        )
    }
}

/// Audits a raw listing, as returned by
/// [`parse_rule_lines`](crate::ca::parse_rule_lines). Later entries are
/// judged against the first entry of their class, in order.
pub fn audit(entries: &[(Rule, usize)]) -> AuditReport {
    let mut first_of_class: HashMap<Context, (Rule, usize)> = HashMap::new();
    let mut conflicts = Vec::new();
    let mut repeats = Vec::new();
    for &(rule, line) in entries {
        let class = rule.context.canonical();
        match first_of_class.get(&class) {
            None => {
                first_of_class.insert(class, (rule, line));
            }
            Some(&(_, first_line)) if first_of_class[&class].0.result == rule.result => {
                repeats.push(Repeat { rule, line, first_line });
            }
            Some(&(first, first_line)) => {
                conflicts.push(RuleConflict {
                    class,
                    first,
                    first_line,
                    second: rule,
                    second_line: line,
                });
            }
        }
    }
    AuditReport {
        raw: entries.len(),
        minimal: first_of_class.len(),
        conflicts,
        repeats,
        unreachable: None,
    }
}

/// Audits a listing and additionally marks the classes a given trace never
/// consulted. Each configuration except the last is stepped over in full, so
/// a class counts as used when any cell, quiescent ones included, presented
/// it.
pub fn audit_with_trace(
    entries: &[(Rule, usize)],
    region: &Region,
    trace: &[Configuration],
) -> AuditReport {
    let mut report = audit(entries);
    let mut used: HashSet<Context> = HashSet::new();
    for config in &trace[..trace.len().saturating_sub(1)] {
        let dense = config.dense(region);
        for idx in 0..region.cell_count() as u32 {
            used.insert(context_at(region, &dense, idx).canonical());
        }
    }
    let mut seen = HashSet::new();
    let unreachable = entries
        .iter()
        .filter(|(rule, _)| {
            let class = rule.context.canonical();
            seen.insert(class) && !used.contains(&class)
        })
        .map(|&(rule, _)| rule)
        .collect();
    report.unreachable = Some(unreachable);
    report
}

/// Expands a table to every distinct rotation of every entry. The result
/// covers the same classes (lookups are unchanged); only the raw listing
/// grows, which is useful for exporting to tools that match verbatim.
pub fn close_under_rotation(table: &RuleTable) -> RuleTable {
    let mut out = RuleTable::new();
    let mut seen: HashSet<Rule> = HashSet::new();
    for (rule, line) in table.rules() {
        for k in 0..7 {
            let rotated = Rule {
                context: rule.context.rotated(k),
                result: rule.result,
            };
            if seen.insert(rotated) {
                out.push(rotated, line)
                    .expect("rotations of agreeing rules cannot conflict");
            }
        }
    }
    out
}

/// How two tables differ, as rotation classes. Entries are the first rule of
/// the class in the table that has it, in that table's order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TableDiff {
    pub only_in_first: Vec<Rule>,
    pub only_in_second: Vec<Rule>,
    /// Classes both cover with different results: (first table's rule,
    /// second table's rule).
    pub disagreements: Vec<(Rule, Rule)>,
}

impl TableDiff {
    /// The tables define the same transition function up to rotation.
    pub fn is_empty(&self) -> bool {
        self.only_in_first.is_empty()
            && self.only_in_second.is_empty()
            && self.disagreements.is_empty()
    }
}

/// Compares two tables class by class.
pub fn diff_tables(first: &RuleTable, second: &RuleTable) -> TableDiff {
    let mut diff = TableDiff::default();
    let mut seen = HashSet::new();
    for (rule, _) in first.rules() {
        if !seen.insert(rule.context.canonical()) {
            continue;
        }
        match second.entry_for(&rule.context) {
            None => diff.only_in_first.push(rule),
            Some((other, _)) if other.result != rule.result => {
                diff.disagreements.push((rule, other));
            }
            Some(_) => {}
        }
    }
    let mut seen = HashSet::new();
    for (rule, _) in second.rules() {
        if seen.insert(rule.context.canonical()) && first.entry_for(&rule.context).is_none() {
            diff.only_in_second.push(rule);
        }
    }
    diff
}

/// One question put to an answer source: the first uncovered cell, in
/// [`CellId`] order, of the first step that could not complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prompt {
    /// The step being computed when the gap appeared (the configuration
    /// under construction has this time index).
    pub step: usize,
    pub cell: CellId,
    /// The context exactly as the cell sees it, unrotated.
    pub context: Context,
}

impl fmt::Display for Prompt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}, cell {}: {} -> ?", self.step, self.cell, self.context)
    }
}

/// Supplies outcomes during elicitation. `None` means the source has run dry.
pub trait AnswerSource {
    fn answer(&mut self, prompt: &Prompt) -> Option<State>;
}

impl<F: FnMut(&Prompt) -> Option<State>> AnswerSource for F {
    fn answer(&mut self, prompt: &Prompt) -> Option<State> {
        self(prompt)
    }
}

/// Answers read ahead of time from text: one state token per line, `#`
/// comments and blank lines skipped, consumed in prompt order.
#[derive(Debug, Clone)]
pub struct ScriptedAnswers {
    answers: std::collections::VecDeque<State>,
}

impl ScriptedAnswers {
    pub fn from_text(text: &str) -> Result<ScriptedAnswers, ParseStateError> {
        let mut answers = std::collections::VecDeque::new();
        for raw in text.lines() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            answers.push_back(body.parse()?);
        }
        Ok(ScriptedAnswers { answers })
    }

    pub fn remaining(&self) -> usize {
        self.answers.len()
    }
}

impl AnswerSource for ScriptedAnswers {
    fn answer(&mut self, _: &Prompt) -> Option<State> {
        self.answers.pop_front()
    }
}

/// Why an elicitation session stopped without completing its run.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElicitError {
    /// An answer contradicts a rule of the same class, loaded or appended
    /// earlier in the session.
    #[error("answer at {prompt} gives {}, but the rule [{existing}] already covers its class", .new.result)]
    Conflict {
        prompt: Prompt,
        existing: Rule,
        new: Rule,
    },
    #[error("out of answers at {prompt}")]
    OutOfAnswers { prompt: Prompt },
    /// The run touched the outermost ring; the scenario does not fit the
    /// region.
    #[error("configuration {at_step} touches the rim ({} cell(s))", .cells.len())]
    RimContact { at_step: usize, cells: Vec<CellId> },
}

/// What a completed elicitation produced.
#[derive(Debug, Clone)]
pub struct ElicitOutcome {
    /// The loaded table plus every session answer, now matching up to
    /// rotation like any other table.
    pub table: RuleTable,
    /// The appended rules, in prompt order, contexts verbatim.
    pub appended: Vec<Rule>,
    /// The trace of the final, fully covered run.
    pub trace: Vec<Configuration>,
}

/// Grows `table` until `steps` steps from `initial` complete, asking `source`
/// for every gap.
///
/// Each prompt is the first uncovered cell in [`CellId`] order; the answered
/// rule is appended and the run restarts from `initial`. Session rules match
/// their context verbatim only, so a rotated form of an already answered
/// class prompts again and must agree with the earlier answer; the loaded
/// table matches up to rotation as always.
pub fn elicit<S: AnswerSource + ?Sized>(
    region: &Region,
    initial: &Configuration,
    table: &RuleTable,
    steps: usize,
    source: &mut S,
) -> Result<ElicitOutcome, ElicitError> {
    let mut appended: Vec<Rule> = Vec::new();
    let mut session_raw: HashMap<Context, State> = HashMap::new();
    let mut session_class: HashMap<Context, Rule> = HashMap::new();

    'session: loop {
        let mut trace = vec![initial.clone()];
        check_rim(region, initial, 0)?;
        for t in 1..=steps {
            let dense = trace.last().unwrap().dense(region);
            let mut next = Configuration::new();
            let mut gap: Option<Prompt> = None;
            for idx in region.cells_in_id_order() {
                let ctx = context_at(region, &dense, idx);
                let hit = table
                    .lookup(&ctx)
                    .or_else(|| session_raw.get(&ctx).copied());
                match hit {
                    Some(state) => next.set(idx, state),
                    None => {
                        gap = Some(Prompt { step: t, cell: region.cell_id(idx), context: ctx });
                        break;
                    }
                }
            }
            if let Some(prompt) = gap {
                let result = source
                    .answer(&prompt)
                    .ok_or(ElicitError::OutOfAnswers { prompt })?;
                let new = Rule { context: prompt.context, result };
                let class = prompt.context.canonical();
                let existing = table
                    .entry_for(&prompt.context)
                    .map(|(rule, _)| rule)
                    .or_else(|| session_class.get(&class).copied());
                if let Some(existing) = existing {
                    if existing.result != result {
                        return Err(ElicitError::Conflict { prompt, existing, new });
                    }
                } else {
                    session_class.insert(class, new);
                }
                session_raw.insert(prompt.context, result);
                appended.push(new);
                continue 'session;
            }
            check_rim(region, &next, t)?;
            trace.push(next);
        }
        let mut table = table.clone();
        for &rule in &appended {
            table
                .push(rule, 0)
                .expect("session answers were checked against the table as they arrived");
        }
        return Ok(ElicitOutcome { table, appended, trace });
    }
}

fn check_rim(region: &Region, config: &Configuration, at_step: usize) -> Result<(), ElicitError> {
    let mut cells: Vec<CellId> = config
        .support()
        .filter(|&(idx, _)| region.is_rim(idx))
        .map(|(idx, _)| region.cell_id(idx))
        .collect();
    if cells.is_empty() {
        Ok(())
    } else {
        cells.sort_unstable();
        Err(ElicitError::RimContact { at_step, cells })
    }
}
