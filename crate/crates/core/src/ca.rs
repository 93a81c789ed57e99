//! The cellular automaton layer: states, rotation-invariant rule tables,
//! sparse configurations and the synchronous step.
//!
//! A rule is written as nine tokens `η η1 .. η7 η'`: the cell's own state,
//! its seven neighbor states in slot order, and the state it takes at the
//! next tick. The automaton is rotation invariant, so two rules whose rings
//! differ by a cyclic shift are the same rule; the table is indexed by the
//! lexicographically minimal rotation of the ring and lookups never privilege
//! slot 1.
//!
//! The step is strict and synchronous: every cell of the region, quiescent
//! ones included, must find its context in the table, and a miss aborts the
//! whole step, reporting each missing rotation class with the cells that
//! needed it. Neighbor slots outside the region read as white. A finite
//! region is only a faithful window on the infinite grid while nothing
//! non-white sits on the outermost ring, so [`run`] stops with an error as
//! soon as the rim is touched.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::{CellId, Region, EXTERIOR};

/// Cell states, in their conventional order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State {
    White,
    Blue,
    Green,
    Red,
}

pub const STATES: [State; 4] = [State::White, State::Blue, State::Green, State::Red];

impl State {
    pub fn letter(self) -> char {
        match self {
            State::White => 'W',
            State::Blue => 'B',
            State::Green => 'G',
            State::Red => 'R',
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Error from parsing a state or rule token.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct ParseStateError(String);

impl FromStr for State {
    type Err = ParseStateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "W" => Ok(State::White),
            "B" => Ok(State::Blue),
            "G" => Ok(State::Green),
            "R" => Ok(State::Red),
            other => Err(ParseStateError(format!(
                "unknown state {other:?}, expected one of W B G R"
            ))),
        }
    }
}

/// What a cell sees in one tick: its own state and the ring of its seven
/// neighbors in slot order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    pub state: State,
    pub ring: [State; 7],
}

impl Context {
    /// The ring shifted by `k` slots (slot 1 takes what slot `1 + k` saw).
    pub fn rotated(self, k: usize) -> Context {
        let mut ring = [State::White; 7];
        for (i, slot) in ring.iter_mut().enumerate() {
            *slot = self.ring[(i + k) % 7];
        }
        Context { state: self.state, ring }
    }

    /// Canonical representative of the rotation class: the lexicographically
    /// smallest of the seven ring rotations. Everything that treats rules up
    /// to rotation goes through this one function.
    pub fn canonical(self) -> Context {
        (0..7).map(|k| self.rotated(k)).min().unwrap()
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.state)?;
        for s in self.ring {
            write!(f, " {s}")?;
        }
        f.write_str(")")
    }
}

/// A single transition: context in, next state out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    pub context: Context,
    pub result: State,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.context.state)?;
        for s in self.context.ring {
            write!(f, " {s}")?;
        }
        write!(f, " {}", self.result)
    }
}

impl FromStr for Rule {
    type Err = ParseStateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens.len() != 9 {
            return Err(ParseStateError(format!(
                "expected 9 state tokens, found {}",
                tokens.len()
            )));
        }
        let mut states = [State::White; 9];
        for (slot, token) in states.iter_mut().zip(&tokens) {
            *slot = token.parse()?;
        }
        Ok(Rule {
            context: Context {
                state: states[0],
                ring: states[1..8].try_into().unwrap(),
            },
            result: states[8],
        })
    }
}

/// Two rules of the same rotation class that disagree on the result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleConflict {
    /// Canonical context both rules cover.
    pub class: Context,
    pub first: Rule,
    pub first_line: usize,
    pub second: Rule,
    pub second_line: usize,
}

impl fmt::Display for RuleConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rules on lines {} and {} both cover {} but give {} and {}",
            self.first_line,
            self.second_line,
            self.class,
            self.first.result,
            self.second.result
        )
    }
}

/// Errors from loading a rule table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{} conflicting rule pair(s), first: {}", .0.len(), .0[0])]
    Conflicts(Vec<RuleConflict>),
}

/// A rotation-invariant transition table.
///
/// Keeps every raw entry in source order (for audits and round-trips) plus a
/// canonical index for lookups. A repeated rule, rotated or verbatim, is
/// accepted silently; a contradicting one is a [`RuleConflict`].
#[derive(Debug, Clone, Default)]
pub struct RuleTable {
    rules: Vec<(Rule, usize)>,
    index: HashMap<Context, (State, usize)>,
}

impl RuleTable {
    pub fn new() -> RuleTable {
        RuleTable::default()
    }

    /// Adds one rule. `Ok(true)` for a new rotation class, `Ok(false)` for a
    /// repeat that agrees with the table. The line number is only carried for
    /// reporting.
    pub fn push(&mut self, rule: Rule, line: usize) -> Result<bool, RuleConflict> {
        let class = rule.context.canonical();
        match self.index.get(&class) {
            None => {
                self.index.insert(class, (rule.result, self.rules.len()));
                self.rules.push((rule, line));
                Ok(true)
            }
            Some(&(result, _)) if result == rule.result => {
                self.rules.push((rule, line));
                Ok(false)
            }
            Some(&(_, pos)) => {
                let (first, first_line) = self.rules[pos];
                Err(RuleConflict {
                    class,
                    first,
                    first_line,
                    second: rule,
                    second_line: line,
                })
            }
        }
    }

    /// Result for a context, up to rotation.
    pub fn lookup(&self, ctx: &Context) -> Option<State> {
        self.index.get(&ctx.canonical()).map(|&(result, _)| result)
    }

    /// The table entry covering a context: the rule as first written, with
    /// its source line.
    pub fn entry_for(&self, ctx: &Context) -> Option<(Rule, usize)> {
        self.index
            .get(&ctx.canonical())
            .map(|&(_, pos)| self.rules[pos])
    }

    /// Raw entries in source order, with line numbers.
    pub fn rules(&self) -> impl Iterator<Item = (Rule, usize)> + '_ {
        self.rules.iter().copied()
    }

    /// Number of raw entries.
    pub fn raw_count(&self) -> usize {
        self.rules.len()
    }

    /// Number of distinct rotation classes.
    pub fn class_count(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Strict loader: parses the text and refuses tables with conflicts,
    /// collecting every conflicting pair before giving up.
    pub fn parse(text: &str) -> Result<RuleTable, TableError> {
        let mut table = RuleTable::new();
        let mut conflicts = Vec::new();
        for (rule, line) in parse_rule_lines(text)? {
            if let Err(c) = table.push(rule, line) {
                conflicts.push(c);
            }
        }
        if conflicts.is_empty() {
            Ok(table)
        } else {
            Err(TableError::Conflicts(conflicts))
        }
    }
}

/// Permissive reader for rule files: returns the raw entries in order, with
/// 1-based line numbers, without judging repeats or conflicts. `#` starts a
/// comment, blank lines are skipped.
pub fn parse_rule_lines(text: &str) -> Result<Vec<(Rule, usize)>, TableError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let rule: Rule = body
            .parse()
            .map_err(|e: ParseStateError| TableError::Parse { line, message: e.0 })?;
        out.push((rule, line));
    }
    Ok(out)
}

/// Error from reading a configuration file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// An assignment of states to the region's cells, stored sparsely: white is
/// the default and never stored, so equality is equality of the non-white
/// support.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration {
    cells: BTreeMap<u32, State>,
}

impl Configuration {
    pub fn new() -> Configuration {
        Configuration::default()
    }

    pub fn get(&self, idx: u32) -> State {
        self.cells.get(&idx).copied().unwrap_or(State::White)
    }

    pub fn set(&mut self, idx: u32, state: State) {
        if state == State::White {
            self.cells.remove(&idx);
        } else {
            self.cells.insert(idx, state);
        }
    }

    /// Non-white cells in index order.
    pub fn support(&self) -> impl Iterator<Item = (u32, State)> + '_ {
        self.cells.iter().map(|(&idx, &state)| (idx, state))
    }

    pub fn support_len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_all_white(&self) -> bool {
        self.cells.is_empty()
    }

    /// Dense snapshot, one state per region cell.
    pub fn dense(&self, region: &Region) -> Vec<State> {
        let mut dense = vec![State::White; region.cell_count()];
        for (&idx, &state) in &self.cells {
            dense[idx as usize] = state;
        }
        dense
    }

    /// Reads lines of `<cell> <state>`, e.g. `C G` or `4:12 B`. `#` starts a
    /// comment. Cells must lie in the region and may be listed once only;
    /// an explicit `W` is allowed and stores nothing.
    pub fn parse(text: &str, region: &Region) -> Result<Configuration, ConfigError> {
        let mut config = Configuration::new();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Parse { line, message };
            let (cell, state) = body
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected <cell> <state>".into()))?;
            let id: CellId = cell.parse().map_err(|e| err(format!("{e}")))?;
            let idx = region
                .index_of(id)
                .ok_or_else(|| err(format!("cell {id} is outside the region")))?;
            if !seen.insert(idx) {
                return Err(err(format!("cell {id} is listed twice")));
            }
            let state: State = state.trim().parse().map_err(|e: ParseStateError| err(e.0))?;
            config.set(idx, state);
        }
        Ok(config)
    }

    /// One `<cell> <state>` line per non-white cell, in [`CellId`] order.
    pub fn format(&self, region: &Region) -> String {
        use fmt::Write;
        let mut out = String::new();
        for idx in region.cells_in_id_order() {
            let state = self.get(idx);
            if state != State::White {
                writeln!(out, "{} {}", region.cell_id(idx), state).unwrap();
            }
        }
        out
    }
}

/// A rotation class the table does not cover, with every cell that needed it
/// during the failed step, in [`CellId`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingRule {
    pub class: Context,
    pub cells: Vec<CellId>,
}

impl fmt::Display for MissingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no rule for {} at", self.class)?;
        for (i, cell) in self.cells.iter().enumerate() {
            write!(f, "{}{}", if i == 0 { " " } else { ", " }, cell)?;
        }
        Ok(())
    }
}

/// The context a cell sees in a dense state snapshot. Exterior slots read
/// as white.
pub fn context_at(region: &Region, dense: &[State], idx: u32) -> Context {
    let mut ring = [State::White; 7];
    for (slot, &nb) in ring.iter_mut().zip(&region.neighbors(idx)) {
        if nb != EXTERIOR {
            *slot = dense[nb as usize];
        }
    }
    Context { state: dense[idx as usize], ring }
}

fn eval_cell(region: &Region, dense: &[State], table: &RuleTable, idx: u32) -> Result<State, Context> {
    let ctx = context_at(region, dense, idx);
    table.lookup(&ctx).ok_or(ctx)
}

fn merge(
    region: &Region,
    results: Vec<Result<State, Context>>,
) -> Result<Configuration, Vec<MissingRule>> {
    let mut next = Configuration::new();
    let mut missing: BTreeMap<Context, Vec<CellId>> = BTreeMap::new();
    for (idx, result) in results.into_iter().enumerate() {
        match result {
            Ok(state) => next.set(idx as u32, state),
            Err(ctx) => missing
                .entry(ctx.canonical())
                .or_default()
                .push(region.cell_id(idx as u32)),
        }
    }
    if missing.is_empty() {
        Ok(next)
    } else {
        Err(missing
            .into_iter()
            .map(|(class, mut cells)| {
                cells.sort_unstable();
                MissingRule { class, cells }
            })
            .collect())
    }
}

/// One synchronous step over the whole region. Every cell is evaluated; on
/// any miss the step aborts and reports all missing classes at once.
///
/// With the `parallel` feature (the default) cells are evaluated on the rayon
/// thread pool; the result is bit-identical to [`step_sequential`].
pub fn step(
    region: &Region,
    config: &Configuration,
    table: &RuleTable,
) -> Result<Configuration, Vec<MissingRule>> {
    let dense = config.dense(region);
    #[cfg(feature = "parallel")]
    let results: Vec<Result<State, Context>> = {
        use rayon::prelude::*;
        (0..region.cell_count() as u32)
            .into_par_iter()
            .map(|idx| eval_cell(region, &dense, table, idx))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<State, Context>> = (0..region.cell_count() as u32)
        .map(|idx| eval_cell(region, &dense, table, idx))
        .collect();
    merge(region, results)
}

/// The same step, forced onto one thread.
pub fn step_sequential(
    region: &Region,
    config: &Configuration,
    table: &RuleTable,
) -> Result<Configuration, Vec<MissingRule>> {
    let dense = config.dense(region);
    let results: Vec<Result<State, Context>> = (0..region.cell_count() as u32)
        .map(|idx| eval_cell(region, &dense, table, idx))
        .collect();
    merge(region, results)
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    /// The step toward configuration `at_step` found uncovered contexts.
    Missing(Vec<MissingRule>),
    /// Configuration `at_step` has non-white cells on the outermost ring,
    /// so from the next step on the region would lie about the plane.
    RimContact(Vec<CellId>),
}

/// An aborted run: the trace computed so far plus the reason.
///
/// For a missing rule, `partial` holds configurations `0 .. at_step`; for rim
/// contact it holds `0 ..= at_step`, the offender last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunFailure {
    pub at_step: usize,
    pub partial: Vec<Configuration>,
    pub kind: FailureKind,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FailureKind::Missing(missing) => {
                write!(f, "step {} is not covered: {} missing class(es)", self.at_step, missing.len())?;
                for m in missing {
                    write!(f, "; {m}")?;
                }
                Ok(())
            }
            FailureKind::RimContact(cells) => {
                write!(f, "configuration {} touches the rim at", self.at_step)?;
                for (i, cell) in cells.iter().enumerate() {
                    write!(f, "{}{}", if i == 0 { " " } else { ", " }, cell)?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for RunFailure {}

fn rim_contact(region: &Region, config: &Configuration) -> Vec<CellId> {
    let mut cells: Vec<CellId> = config
        .support()
        .filter(|&(idx, _)| region.is_rim(idx))
        .map(|(idx, _)| region.cell_id(idx))
        .collect();
    cells.sort_unstable();
    cells
}

/// Runs `steps` synchronous steps and returns the full trace, the initial
/// configuration first (`steps + 1` entries). Stops early on a missing rule
/// or on rim contact; the initial configuration is itself checked for rim
/// contact before anything moves.
pub fn run(
    region: &Region,
    initial: &Configuration,
    table: &RuleTable,
    steps: usize,
) -> Result<Vec<Configuration>, RunFailure> {
    let mut trace = vec![initial.clone()];
    let rim = rim_contact(region, initial);
    if !rim.is_empty() {
        return Err(RunFailure { at_step: 0, partial: trace, kind: FailureKind::RimContact(rim) });
    }
    for t in 1..=steps {
        match step(region, trace.last().unwrap(), table) {
            Ok(next) => {
                let rim = rim_contact(region, &next);
                trace.push(next);
                if !rim.is_empty() {
                    return Err(RunFailure {
                        at_step: t,
                        partial: trace,
                        kind: FailureKind::RimContact(rim),
                    });
                }
            }
            Err(missing) => {
                return Err(RunFailure {
                    at_step: t,
                    partial: trace,
                    kind: FailureKind::Missing(missing),
                })
            }
        }
    }
    Ok(trace)
}

/// Renders a trace as `== t=<k> ==` blocks of configuration lines.
pub fn format_trace(region: &Region, trace: &[Configuration]) -> String {
    use fmt::Write;
    let mut out = String::new();
    for (t, config) in trace.iter().enumerate() {
        writeln!(out, "== t={t} ==").unwrap();
        out.push_str(&config.format(region));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(state: State, ring: [State; 7]) -> Context {
        Context { state, ring }
    }

    const W: State = State::White;
    const B: State = State::Blue;
    const G: State = State::Green;
    const R: State = State::Red;

    #[test]
    fn states_order_and_letters() {
        assert!(W < B && B < G && G < R);
        let letters: String = STATES.iter().map(|s| s.letter()).collect();
        assert_eq!(letters, "WBGR");
        for s in STATES {
            assert_eq!(s.to_string().parse::<State>().unwrap(), s);
        }
        assert!("X".parse::<State>().is_err());
        assert!("w".parse::<State>().is_err());
    }

    #[test]
    fn canonical_is_the_least_rotation() {
        let c = ctx(B, [B, W, W, W, W, W, W]);
        assert_eq!(c.canonical(), ctx(B, [W, W, W, W, W, W, B]));
        // canonical is rotation invariant and idempotent
        for k in 0..7 {
            assert_eq!(c.rotated(k).canonical(), c.canonical());
        }
        assert_eq!(c.canonical().canonical(), c.canonical());
        // the cell's own state is not part of the rotation
        let d = ctx(G, [B, W, W, W, W, W, W]);
        assert_eq!(d.canonical().state, G);
    }

    #[test]
    fn rule_text_round_trips() {
        let rule: Rule = "B W G R W W B W R".parse().unwrap();
        assert_eq!(rule.context.state, B);
        assert_eq!(rule.result, R);
        assert_eq!(rule.to_string(), "B W G R W W B W R");
        assert!("B W G".parse::<Rule>().is_err());
        assert!("B W G R W W B W R R".parse::<Rule>().is_err());
        assert!("B W G R W W Q W R".parse::<Rule>().is_err());
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let text = "# header\n\nW W W W W W W W W\n  # indented comment\nB W W W W W W W B # trailing\n";
        let entries = parse_rule_lines(text).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].1, 3);
        assert_eq!(entries[1].1, 5);
    }

    #[test]
    fn rotated_repeats_are_silent_and_conflicts_are_not() {
        let mut table = RuleTable::new();
        let a: Rule = "B B W W W W W W R".parse().unwrap();
        let b: Rule = "B W W W W W W B R".parse().unwrap(); // same class, same result
        let c: Rule = "B W W W W W W B G".parse().unwrap(); // same class, other result
        assert_eq!(table.push(a, 1), Ok(true));
        assert_eq!(table.push(b, 2), Ok(false));
        let conflict = table.push(c, 3).unwrap_err();
        assert_eq!(conflict.class, ctx(B, [W, W, W, W, W, W, B]));
        assert_eq!(conflict.first_line, 1);
        assert_eq!(conflict.second_line, 3);
        assert_eq!(table.raw_count(), 2);
        assert_eq!(table.class_count(), 1);
    }

    #[test]
    fn strict_parse_collects_every_conflict() {
        let text = "B B W W W W W W R\nB W W W W W W B G\nG W W W W W W W R\nG W W W W W W W B\n";
        match RuleTable::parse(text).unwrap_err() {
            TableError::Conflicts(list) => {
                assert_eq!(list.len(), 2);
                assert_eq!((list[0].first_line, list[0].second_line), (1, 2));
                assert_eq!((list[1].first_line, list[1].second_line), (3, 4));
            }
            other => panic!("expected conflicts, got {other:?}"),
        }
    }

    #[test]
    fn lookup_ignores_rotation() {
        let mut table = RuleTable::new();
        table.push("W G W B W W W W R".parse().unwrap(), 1).unwrap();
        for k in 0..7 {
            let rotated = ctx(W, [G, W, B, W, W, W, W]).rotated(k);
            assert_eq!(table.lookup(&rotated), Some(R), "rotation {k}");
        }
        assert_eq!(table.lookup(&ctx(B, [G, W, B, W, W, W, W])), None);
    }

    #[test]
    fn configuration_stores_no_white() {
        let region = Region::build(1).unwrap();
        let mut config = Configuration::new();
        config.set(3, G);
        config.set(3, W);
        assert!(config.is_all_white());
        config.set(5, B);
        assert_eq!(config.get(5), B);
        assert_eq!(config.get(6), W);
        assert_eq!(config.support_len(), 1);
        let text = config.format(&region);
        assert_eq!(text, "5:1 B\n");
        assert_eq!(Configuration::parse(&text, &region).unwrap(), config);
    }

    #[test]
    fn configuration_parse_rejects_bad_lines() {
        let region = Region::build(1).unwrap();
        let bad = |text: &str| Configuration::parse(text, &region).unwrap_err();
        assert!(matches!(bad("C"), ConfigError::Parse { line: 1, .. }));
        assert!(matches!(bad("C Q"), ConfigError::Parse { line: 1, .. }));
        assert!(matches!(bad("1:99 G"), ConfigError::Parse { line: 1, .. }));
        assert!(matches!(bad("C G\nC B"), ConfigError::Parse { line: 2, .. }));
        // explicit white is allowed and stores nothing
        let config = Configuration::parse("C W", &region).unwrap();
        assert!(config.is_all_white());
    }

    fn single_green_at_root(region: &Region) -> Configuration {
        let root = region.index_of(CellId::InSector { sector: 1, nu: 1 }).unwrap();
        let mut config = Configuration::new();
        config.set(root, G);
        config
    }

    #[test]
    fn missing_rules_name_every_class_and_witness() {
        let region = Region::build(1).unwrap();
        let table = RuleTable::parse("W W W W W W W W W\n").unwrap();
        let config = single_green_at_root(&region);
        let missing = step(&region, &config, &table).unwrap_err();
        assert_eq!(missing.len(), 2);
        // the class with the lesser own-state comes first
        assert_eq!(missing[0].class, ctx(W, [W, W, W, W, W, W, G]));
        let witnesses: Vec<String> = missing[0].cells.iter().map(|c| c.to_string()).collect();
        assert_eq!(witnesses, ["C", "1:2", "1:3", "1:4", "2:1", "2:2", "7:1"]);
        assert_eq!(missing[1].class, ctx(G, [W, W, W, W, W, W, W]));
        assert_eq!(missing[1].cells, [CellId::InSector { sector: 1, nu: 1 }]);
    }

    #[test]
    fn strictness_even_on_the_all_white_configuration() {
        let region = Region::build(1).unwrap();
        let empty = RuleTable::new();
        let missing = step(&region, &Configuration::new(), &empty).unwrap_err();
        assert_eq!(missing.len(), 1);
        assert_eq!(missing[0].class, ctx(W, [W, W, W, W, W, W, W]));
        assert_eq!(missing[0].cells.len(), region.cell_count());
    }

    #[test]
    fn parallel_and_sequential_steps_agree() {
        let region = Region::build(2).unwrap();
        let table = RuleTable::parse(
            "W W W W W W W W W\nG W W W W W W W W\nW G W W W W W W W\n",
        )
        .unwrap();
        let config = single_green_at_root(&region);
        assert_eq!(step(&region, &config, &table), step_sequential(&region, &config, &table));
        // and on a failing step the reports agree too
        let quiescent = RuleTable::parse("W W W W W W W W W\n").unwrap();
        assert_eq!(
            step(&region, &config, &quiescent),
            step_sequential(&region, &config, &quiescent)
        );
    }

    #[test]
    fn run_reaches_a_fixed_point_and_formats_the_trace() {
        let region = Region::build(1).unwrap();
        // a lone green fades in one tick
        let table = RuleTable::parse(
            "W W W W W W W W W\nG W W W W W W W W\nW G W W W W W W W\n",
        )
        .unwrap();
        let config = single_green_at_root(&region);
        let trace = run(&region, &config, &table, 3).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[0], config);
        assert!(trace[1].is_all_white());
        assert!(trace[3].is_all_white());
        let text = format_trace(&region, &trace);
        assert_eq!(text, "== t=0 ==\n1:1 G\n== t=1 ==\n== t=2 ==\n== t=3 ==\n");
    }

    #[test]
    fn run_stops_on_missing_rule_with_partial_trace() {
        let region = Region::build(1).unwrap();
        // green spreads to its neighbors, then the grown cluster is uncovered
        let table = RuleTable::parse("W W W W W W W W W\n").unwrap();
        let config = single_green_at_root(&region);
        let failure = run(&region, &config, &table, 5).unwrap_err();
        assert_eq!(failure.at_step, 1);
        assert_eq!(failure.partial, vec![config]);
        assert!(matches!(failure.kind, FailureKind::Missing(ref m) if m.len() == 2));
    }

    #[test]
    fn run_stops_on_rim_contact() {
        let region = Region::build(1).unwrap();
        // growth: anything that sees green turns green, green persists
        let table = RuleTable::parse(
            "W W W W W W W W W\nG W W W W W W W G\nW G W W W W W W G\n",
        )
        .unwrap();
        let config = single_green_at_root(&region);
        let failure = run(&region, &config, &table, 5).unwrap_err();
        assert_eq!(failure.at_step, 1);
        assert_eq!(failure.partial.len(), 2);
        match &failure.kind {
            FailureKind::RimContact(cells) => {
                let names: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
                assert_eq!(names, ["1:2", "1:3", "1:4", "2:2"]);
            }
            other => panic!("expected rim contact, got {other:?}"),
        }
        // a rim cell in the initial configuration is refused outright
        let mut on_rim = Configuration::new();
        let rim_cell = region.index_of(CellId::InSector { sector: 3, nu: 2 }).unwrap();
        assert!(region.is_rim(rim_cell));
        on_rim.set(rim_cell, B);
        let failure = run(&region, &on_rim, &table, 5).unwrap_err();
        assert_eq!(failure.at_step, 0);
        assert!(matches!(failure.kind, FailureKind::RimContact(_)));
    }
}
