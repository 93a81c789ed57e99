//! The railway-circuit model, at two levels.
//!
//! The abstract level is a graph of tracks and switches crossed by a single
//! locomotive. A switch joins a trunk track `u` to two branches; crossing
//! from `u` is active and exits through the selected branch, crossing from a
//! branch is passive and exits through `u`. A fixed switch never changes its
//! selection, a flip-flop toggles it on every active crossing and must never
//! be crossed passively, and a memory switch selects the branch of the most
//! recent passive crossing. [`run_circuit`] walks a locomotive through such a
//! graph; [`elementary_circuit`] wires one bit of memory out of four switches
//! and [`register_unit`] one unit of a counter register.
//!
//! The concrete level puts tracks onto the heptagrid as CA configurations:
//! colored guard rings, blank running tracks, blue milestones, and the
//! two-cell locomotive (blue front, red rear). A horizontal path occupies
//! four consecutive levels: a green ring, a blue ring, the blank running
//! ring, and a safeguard ring whose black cells carry blue milestones; built
//! this way it is a fixed point of the rule table until a locomotive is
//! placed. The same file holds the tile-coloring substitution that marks the
//! verticals of the grid and a 1-row motion oracle used to cross-check the
//! on-grid locomotive.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ca::{Configuration, State};
use crate::grid::{CellId, NodeKind, Region, EXTERIOR};

// --- switches ---------------------------------------------------------

/// The two branch tracks of a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SwitchKind {
    Fixed,
    FlipFlop,
    Memory,
}

/// A switch and its current selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SwitchState {
    pub kind: SwitchKind,
    pub selected: Side,
}

/// How the locomotive enters a switch. Branch entries are named relative to
/// the selection at the moment of entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchEntry {
    FromU,
    FromSelected,
    FromNonSelected,
}

/// Where the locomotive leaves a switch. Branches are named statically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchExit {
    U,
    Branch(Side),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SwitchError {
    /// Flip-flops are active-only by the model's contract.
    #[error("a flip-flop switch cannot be crossed passively")]
    PassiveFlipFlop,
}

/// One crossing: returns the exit and the state after the crossing.
///
/// Active crossings (from `u`) exit through the selected branch; passive
/// crossings exit through `u`. A fixed switch never changes. A flip-flop
/// toggles on every active crossing and refuses passive ones. A memory
/// switch changes only on passive crossings, to the branch just used.
pub fn cross_switch(
    s: SwitchState,
    entry: SwitchEntry,
) -> Result<(SwitchExit, SwitchState), SwitchError> {
    match entry {
        SwitchEntry::FromU => {
            let exit = SwitchExit::Branch(s.selected);
            let after = match s.kind {
                SwitchKind::FlipFlop => SwitchState { selected: s.selected.other(), ..s },
                SwitchKind::Fixed | SwitchKind::Memory => s,
            };
            Ok((exit, after))
        }
        SwitchEntry::FromSelected | SwitchEntry::FromNonSelected => {
            let used = match entry {
                SwitchEntry::FromSelected => s.selected,
                _ => s.selected.other(),
            };
            let after = match s.kind {
                SwitchKind::FlipFlop => return Err(SwitchError::PassiveFlipFlop),
                SwitchKind::Fixed => s,
                SwitchKind::Memory => SwitchState { selected: used, ..s },
            };
            Ok((SwitchExit::U, after))
        }
    }
}

// --- circuit graphs ---------------------------------------------------

/// A static switch port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    U,
    Branch(Side),
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::U => f.write_str("u"),
            Port::Branch(Side::Left) => f.write_str("left"),
            Port::Branch(Side::Right) => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Terminal(usize),
    Joint(usize),
    SwitchPort(usize, Port),
}

/// Errors from building or running a circuit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("endpoint {0:?} is linked more than once")]
    DoublePlug(String),
    #[error("switch port {0:?} is never linked")]
    UnpluggedPort(String),
    #[error("joint {0:?} must have exactly two links, has {1}")]
    BadJoint(String, usize),
    #[error("no terminal named {0:?}")]
    UnknownEntry(String),
    #[error("expected {expected} switch states, got {got}")]
    MismatchedStates { expected: usize, got: usize },
    #[error("flip-flop {0:?} was entered passively")]
    PassiveFlipFlop(String),
    #[error("locomotive still travelling after {0} crossings")]
    BudgetExhausted(usize),
}

/// A wired circuit: switches, plain joints, named terminals, and two-way
/// track segments plugged into them. Every switch port and terminal carries
/// exactly one segment, every joint exactly two, so the locomotive's route
/// is deterministic.
#[derive(Debug, Clone)]
pub struct CircuitGraph {
    switches: Vec<(String, SwitchState)>,
    terminals: Vec<String>,
    joints: Vec<String>,
    links: HashMap<Node, Vec<Node>>,
}

impl CircuitGraph {
    /// The switch selections the circuit was declared with.
    pub fn initial_states(&self) -> Vec<SwitchState> {
        self.switches.iter().map(|&(_, s)| s).collect()
    }

    pub fn switch_names(&self) -> impl Iterator<Item = &str> {
        self.switches.iter().map(|(name, _)| name.as_str())
    }

    pub fn switch_index(&self, name: &str) -> Option<usize> {
        self.switches.iter().position(|(n, _)| n == name)
    }

    fn node_name(&self, node: Node) -> String {
        match node {
            Node::Terminal(i) => self.terminals[i].clone(),
            Node::Joint(i) => self.joints[i].clone(),
            Node::SwitchPort(i, port) => format!("{}.{}", self.switches[i].0, port),
        }
    }
}

/// Assembles a [`CircuitGraph`] from switches, joints, and links.
///
/// Link endpoints are strings: a bare name is a terminal (or a declared
/// joint), `name.u` / `name.left` / `name.right` address a switch port.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    switches: Vec<(String, SwitchState)>,
    joints: Vec<String>,
    links: Vec<(String, String, usize)>,
}

impl CircuitBuilder {
    pub fn new() -> CircuitBuilder {
        CircuitBuilder::default()
    }

    pub fn switch(&mut self, name: &str, kind: SwitchKind, selected: Side) -> &mut Self {
        self.switches.push((name.to_string(), SwitchState { kind, selected }));
        self
    }

    pub fn joint(&mut self, name: &str) -> &mut Self {
        self.joints.push(name.to_string());
        self
    }

    pub fn link(&mut self, a: &str, b: &str) -> &mut Self {
        self.links.push((a.to_string(), b.to_string(), 0));
        self
    }

    fn link_at(&mut self, a: &str, b: &str, line: usize) -> &mut Self {
        self.links.push((a.to_string(), b.to_string(), line));
        self
    }

    pub fn build(self) -> Result<CircuitGraph, CircuitError> {
        let mut graph = CircuitGraph {
            switches: self.switches,
            terminals: Vec::new(),
            joints: self.joints,
            links: HashMap::new(),
        };
        let resolve = |g: &mut CircuitGraph, name: &str, line: usize| -> Result<Node, CircuitError> {
            if let Some((sw, port)) = name.split_once('.') {
                let i = g
                    .switch_index(sw)
                    .ok_or_else(|| CircuitError::Parse {
                        line,
                        message: format!("no switch named {sw:?}"),
                    })?;
                let port = match port {
                    "u" => Port::U,
                    "left" => Port::Branch(Side::Left),
                    "right" => Port::Branch(Side::Right),
                    other => {
                        return Err(CircuitError::Parse {
                            line,
                            message: format!("unknown port {other:?}, expected u, left or right"),
                        })
                    }
                };
                return Ok(Node::SwitchPort(i, port));
            }
            if let Some(i) = g.joints.iter().position(|j| j == name) {
                return Ok(Node::Joint(i));
            }
            if let Some(i) = g.terminals.iter().position(|t| t == name) {
                return Ok(Node::Terminal(i));
            }
            graph_push_terminal(g, name)
        };
        for (a, b, line) in &self.links {
            let na = resolve(&mut graph, a, *line)?;
            let nb = resolve(&mut graph, b, *line)?;
            graph.links.entry(na).or_default().push(nb);
            graph.links.entry(nb).or_default().push(na);
        }
        // plug counts: ports and terminals take one link, joints two
        for (i, (name, _)) in graph.switches.iter().enumerate() {
            for port in [Port::U, Port::Branch(Side::Left), Port::Branch(Side::Right)] {
                let node = Node::SwitchPort(i, port);
                match graph.links.get(&node).map_or(0, |l| l.len()) {
                    0 => return Err(CircuitError::UnpluggedPort(format!("{name}.{port}"))),
                    1 => {}
                    _ => return Err(CircuitError::DoublePlug(format!("{name}.{port}"))),
                }
            }
        }
        for (i, name) in graph.terminals.iter().enumerate() {
            if graph.links[&Node::Terminal(i)].len() != 1 {
                return Err(CircuitError::DoublePlug(name.clone()));
            }
        }
        for (i, name) in graph.joints.iter().enumerate() {
            let n = graph.links.get(&Node::Joint(i)).map_or(0, |l| l.len());
            if n != 2 {
                return Err(CircuitError::BadJoint(name.clone(), n));
            }
        }
        Ok(graph)
    }
}

fn graph_push_terminal(g: &mut CircuitGraph, name: &str) -> Result<Node, CircuitError> {
    g.terminals.push(name.to_string());
    Ok(Node::Terminal(g.terminals.len() - 1))
}

/// Reads a circuit from text: `switch <name> fixed|flip-flop|memory
/// left|right`, `joint <name>`, `link <end> <end>`. `#` starts a comment.
pub fn parse_circuit(text: &str) -> Result<CircuitGraph, CircuitError> {
    let mut builder = CircuitBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| CircuitError::Parse { line, message };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        match tokens.as_slice() {
            ["switch", name, kind, side] => {
                let kind = match *kind {
                    "fixed" => SwitchKind::Fixed,
                    "flip-flop" => SwitchKind::FlipFlop,
                    "memory" => SwitchKind::Memory,
                    other => return Err(err(format!("unknown switch kind {other:?}"))),
                };
                let side = match *side {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => return Err(err(format!("unknown side {other:?}"))),
                };
                builder.switch(name, kind, side);
            }
            ["joint", name] => {
                builder.joint(name);
            }
            ["link", a, b] => {
                builder.link_at(a, b, line);
            }
            _ => return Err(err("expected: switch <name> <kind> <side> | joint <name> | link <a> <b>".into())),
        }
    }
    builder.build()
}

/// A finished walk: where the locomotive left, the switch states afterward,
/// and every node it visited (entry and exit terminals included).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitRun {
    pub exit: String,
    pub states: Vec<SwitchState>,
    pub visited: Vec<String>,
}

/// Walks the locomotive from a terminal until it reaches another terminal
/// (possibly the entry itself). `budget` caps the number of switch
/// crossings, so a circuit that traps the locomotive reports an error
/// instead of looping.
pub fn run_circuit(
    graph: &CircuitGraph,
    states: &[SwitchState],
    entry: &str,
    budget: usize,
) -> Result<CircuitRun, CircuitError> {
    if states.len() != graph.switches.len() {
        return Err(CircuitError::MismatchedStates {
            expected: graph.switches.len(),
            got: states.len(),
        });
    }
    let start = graph
        .terminals
        .iter()
        .position(|t| t == entry)
        .ok_or_else(|| CircuitError::UnknownEntry(entry.to_string()))?;
    let mut states = states.to_vec();
    let mut visited = vec![entry.to_string()];
    let mut from = Node::Terminal(start);
    let mut here = graph.links[&from][0];
    let mut crossings = 0usize;
    loop {
        visited.push(graph.node_name(here));
        match here {
            Node::Terminal(i) => {
                return Ok(CircuitRun { exit: graph.terminals[i].clone(), states, visited });
            }
            Node::Joint(i) => {
                let next = graph.links[&here]
                    .iter()
                    .copied()
                    .find(|&n| n != from)
                    .expect("a joint has two links");
                let _ = i;
                from = here;
                here = next;
            }
            Node::SwitchPort(i, port) => {
                crossings += 1;
                if crossings > budget {
                    return Err(CircuitError::BudgetExhausted(budget));
                }
                let s = states[i];
                let entry = match port {
                    Port::U => SwitchEntry::FromU,
                    Port::Branch(side) if side == s.selected => SwitchEntry::FromSelected,
                    Port::Branch(_) => SwitchEntry::FromNonSelected,
                };
                let (exit, after) = cross_switch(s, entry).map_err(|SwitchError::PassiveFlipFlop| {
                    CircuitError::PassiveFlipFlop(graph.switches[i].0.clone())
                })?;
                states[i] = after;
                let out_port = match exit {
                    SwitchExit::U => Port::U,
                    SwitchExit::Branch(side) => Port::Branch(side),
                };
                let out_node = Node::SwitchPort(i, out_port);
                visited.push(graph.node_name(out_node));
                from = out_node;
                here = graph.links[&out_node][0];
            }
        }
    }
}

/// The one-bit memory element: a flip-flop at the write entry `U`, a memory
/// switch at the read entry `E`, and two fixed merges.
///
/// Reading (enter at `E`) leaves through `O1` when the bit is `Left`, `O2`
/// when it is `Right`, changing nothing. Writing (enter at `U`) flips the
/// bit — both the flip-flop and the memory switch toggle — and leaves
/// through `E`. The two switches always agree on the stored bit.
pub fn elementary_circuit(bit: Side) -> CircuitGraph {
    let mut b = CircuitBuilder::new();
    b.switch("ff", SwitchKind::FlipFlop, bit)
        .switch("mem", SwitchKind::Memory, bit)
        .switch("m1", SwitchKind::Fixed, Side::Left)
        .switch("m2", SwitchKind::Fixed, Side::Left)
        .link("E", "mem.u")
        .link("U", "ff.u")
        .link("ff.left", "m2.right")
        .link("ff.right", "m1.right")
        .link("m1.u", "mem.left")
        .link("m2.u", "mem.right")
        .link("m1.left", "O1")
        .link("m2.left", "O2");
    b.build().expect("the elementary circuit is statically well-formed")
}

/// One unit of a register, holding one mark.
///
/// Incrementing (enter at `i`) marks the unit and leaves through `r`.
/// Decrementing (enter at `d`) unmarks an occupied unit and leaves through
/// `r`; on an empty unit it leaves through the jump tracks instead,
/// alternating `j1`, `j2`, `j1`, … on consecutive failures (an active-only
/// flip-flop fans the empty exits out).
pub fn register_unit(occupied: bool) -> CircuitGraph {
    let selected = if occupied { Side::Left } else { Side::Right };
    let mut b = CircuitBuilder::new();
    b.switch("m", SwitchKind::Memory, selected)
        .switch("f1", SwitchKind::Fixed, Side::Left)
        .switch("f2", SwitchKind::Fixed, Side::Left)
        .switch("f3", SwitchKind::Fixed, Side::Right)
        .switch("jf", SwitchKind::FlipFlop, Side::Left)
        .link("f1.u", "m.u")
        .link("f1.left", "r")
        .link("f1.right", "d")
        .link("f3.u", "m.left")
        .link("f3.left", "i")
        .link("f3.right", "f2.right")
        .link("f2.u", "m.right")
        .link("f2.left", "jf.u")
        .link("jf.left", "j1")
        .link("jf.right", "j2");
    b.build().expect("the register unit is statically well-formed")
}

// --- tile coloring ----------------------------------------------------

/// Tiling colors, distinct from CA states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TileColor {
    Green,
    Blue,
    Yellow,
    Orange,
}

pub const TILE_COLORS: [TileColor; 4] =
    [TileColor::Green, TileColor::Blue, TileColor::Yellow, TileColor::Orange];

impl TileColor {
    pub fn letter(self) -> char {
        match self {
            TileColor::Green => 'G',
            TileColor::Blue => 'B',
            TileColor::Yellow => 'Y',
            TileColor::Orange => 'O',
        }
    }

    fn index(self) -> usize {
        TILE_COLORS.iter().position(|&c| c == self).unwrap()
    }
}

/// The coloring substitution. Blue is the only 2-production, matching the
/// arity of black nodes; the other colors belong to white nodes.
pub fn substitute(c: TileColor) -> &'static [TileColor] {
    use TileColor::{Blue as B, Green as G, Orange as O, Yellow as Y};
    match c {
        G => &[Y, B, G],
        Y => &[Y, B, G],
        O => &[Y, B, O],
        B => &[B, O],
    }
}

/// A coloring of one sector tree; cells outside the sector are unpainted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub sector: u8,
    colors: Vec<Option<TileColor>>,
}

impl Coloring {
    pub fn color(&self, idx: u32) -> Option<TileColor> {
        self.colors[idx as usize]
    }

    /// Color counts on one level, in [`TILE_COLORS`] order.
    pub fn census(&self, region: &Region, level: u32) -> [u64; 4] {
        let mut counts = [0u64; 4];
        for idx in region.ring(level) {
            if let Some(c) = self.colors[idx as usize] {
                counts[c.index()] += 1;
            }
        }
        counts
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum PaintError {
    #[error("sector {0} is not in 1..=7")]
    BadSector(u8),
    /// Blue marks black nodes; sector roots are white.
    #[error("a sector root cannot be blue")]
    BlueRoot,
}

/// Colors one sector tree downward from its root color.
///
/// The root takes `root`; every cell hands its sons the production of its
/// color in son order, except that the production's one blue always lands on
/// the black son. Blue cells are exactly the black nodes.
pub fn paint_sector(region: &Region, sector: u8, root: TileColor) -> Result<Coloring, PaintError> {
    if !(1..=7).contains(&sector) {
        return Err(PaintError::BadSector(sector));
    }
    if root == TileColor::Blue {
        return Err(PaintError::BlueRoot);
    }
    let mut colors = vec![None; region.cell_count()];
    let root_idx = region
        .index_of(CellId::InSector { sector, nu: 1 })
        .expect("every region holds the sector roots");
    colors[root_idx as usize] = Some(root);
    for level in 0..region.max_level() {
        for idx in region.ring(level) {
            let Some(color) = colors[idx as usize] else { continue };
            let sons = region.sons(idx);
            let production = substitute(color);
            // blue to the black son, the rest in production order
            let mut rest = production.iter().copied().filter(|&c| c != TileColor::Blue);
            for &son in sons.iter().filter(|&&s| s != EXTERIOR) {
                colors[son as usize] = Some(match region.kind(son) {
                    NodeKind::Black => TileColor::Blue,
                    NodeKind::White => rest.next().expect("productions carry one color per white son"),
                });
            }
        }
    }
    Ok(Coloring { sector, colors })
}

/// Yellow rays and isocline grouping of a colored sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringLines {
    /// Maximal father-to-son chains of yellow tiles, each listed top-down.
    pub rays: Vec<Vec<u32>>,
    /// Painted cells grouped by isocline label; the label of a cell is its
    /// level, so entry `l` holds the sector's slice of ring `l`.
    pub isoclines: Vec<Vec<u32>>,
}

/// Finds the verticals (yellow rays) and isoclines of a coloring.
pub fn verticals_and_isoclines(region: &Region, coloring: &Coloring) -> ColoringLines {
    let is_yellow = |idx: u32| coloring.color(idx) == Some(TileColor::Yellow);
    let mut rays = Vec::new();
    let mut isoclines = vec![Vec::new(); region.max_level() as usize + 1];
    for level in 0..=region.max_level() {
        for idx in region.ring(level) {
            if coloring.color(idx).is_some() {
                isoclines[level as usize].push(idx);
            }
            if !is_yellow(idx) {
                continue;
            }
            // a ray starts where the father is not yellow
            if region.father(idx).is_some_and(is_yellow) {
                continue;
            }
            let mut ray = vec![idx];
            loop {
                let top = *ray.last().unwrap();
                let next = region
                    .sons(top)
                    .into_iter()
                    .filter(|&s| s != EXTERIOR)
                    .find(|&s| is_yellow(s));
                match next {
                    Some(s) => ray.push(s),
                    None => break,
                }
            }
            rays.push(ray);
        }
    }
    ColoringLines { rays, isoclines }
}

// --- paths on the grid ------------------------------------------------

/// Travel direction along a track: `Asc` follows ascending ν (ring
/// successors), `Desc` the other way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Asc,
    Desc,
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asc" => Ok(Direction::Asc),
            "desc" => Ok(Direction::Desc),
            other => Err(format!("unknown direction {other:?}, expected asc or desc")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Horizontal,
    Vertical,
    SlipRoad,
}

/// A path to build: where, which kind, how far, travel direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSpec {
    pub kind: PathKind,
    /// For a horizontal path, any cell of the ring that carries the green
    /// track; for a vertical, the white cell the ray starts at.
    pub anchor: CellId,
    /// Vertical ray length in cells; 0 extends to the deepest level the
    /// margin allows. Horizontal and slip-road tracks are closed rings, so
    /// they accept only 0.
    pub span: u64,
    pub direction: Direction,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("anchor {0} lies outside the region")]
    AnchorOutsideRegion(CellId),
    #[error("the path needs levels up to {needed} but the region keeps a 2-level margin below level {max_level}")]
    DoesNotFit { needed: u32, max_level: u32 },
    #[error("{kind} tracks are closed rings; span must be 0")]
    ClosedRing { kind: String },
    #[error("a vertical ray needs a white anchor, {0} is black")]
    BlackAnchor(CellId),
    #[error("span {span} is too short, need at least {min}")]
    SpanTooShort { span: u64, min: u64 },
    #[error("track position {position} is outside the track of {len} cells")]
    OffTrack { position: usize, len: usize },
    #[error("locomotive placement is only supported on horizontal paths")]
    LocomotiveUnsupported,
}

/// A built path: the idle configuration plus the cell sets that make it up.
#[derive(Debug, Clone)]
pub struct BuiltPath {
    pub spec: PathSpec,
    /// The idle track, a fixed point of the step.
    pub config: Configuration,
    /// Green guard cells.
    pub s1: Vec<u32>,
    /// Blue guard cells.
    pub s2: Vec<u32>,
    /// The blank running track, in ascending travel order.
    pub s3: Vec<u32>,
    /// Safeguard cells; its black members carry the blue milestones.
    pub s4: Vec<u32>,
    /// The blue cells of `s4`.
    pub milestones: Vec<u32>,
    /// Structural checks: one line per violated constraint, plus notes on
    /// candidate status. Empty means every checked constraint holds.
    pub report: Vec<String>,
}

impl BuiltPath {
    /// The running track in travel order.
    pub fn track(&self) -> &[u32] {
        &self.s3
    }
}

/// Builds a path of the given kind.
///
/// A horizontal path occupies four full consecutive rings from the anchor's
/// level: green, blue, the blank running ring, and the safeguard ring whose
/// black cells become blue milestones. A milestone then touches the running
/// ring twice (father and uncle), every other safeguard cell once (father).
///
/// A vertical path follows the middle-son ray down from the anchor (green)
/// with the companion chain of their ring predecessors in blue; these
/// predecessors are the black first sons of the ray, linked to each other by
/// nephew edges, so the blue line is connected. The layout is a fixed point
/// of the shipped table; the running cells for a moving locomotive are not
/// derivable from the available material, so `s3` stays empty and the
/// report says so.
///
/// A slip road is a reduced horizontal path: green, blue and running rings
/// only, with a milestone triangle marking the junction next to the anchor's
/// safeguard position.
pub fn build_path(region: &Region, spec: PathSpec) -> Result<BuiltPath, PathError> {
    let anchor = region
        .index_of(spec.anchor)
        .ok_or(PathError::AnchorOutsideRegion(spec.anchor))?;
    let level = region.level(anchor);
    let margin = 2;
    let fit = |needed: u32| {
        if needed + margin > region.max_level() {
            Err(PathError::DoesNotFit { needed, max_level: region.max_level() })
        } else {
            Ok(())
        }
    };
    let mut path = BuiltPath {
        spec,
        config: Configuration::new(),
        s1: Vec::new(),
        s2: Vec::new(),
        s3: Vec::new(),
        s4: Vec::new(),
        milestones: Vec::new(),
        report: Vec::new(),
    };
    match spec.kind {
        PathKind::Horizontal => {
            if spec.span != 0 {
                return Err(PathError::ClosedRing { kind: "horizontal".into() });
            }
            fit(level + 3)?;
            path.s1 = region.ring(level).collect();
            path.s2 = region.ring(level + 1).collect();
            path.s3 = region.ring(level + 2).collect();
            path.s4 = region.ring(level + 3).collect();
            for &c in &path.s1 {
                path.config.set(c, State::Green);
            }
            for &c in &path.s2 {
                path.config.set(c, State::Blue);
            }
            for &c in &path.s4 {
                if region.kind(c) == NodeKind::Black {
                    path.config.set(c, State::Blue);
                    path.milestones.push(c);
                }
            }
            check_milestones(region, &path.s3, &path.s4, &path.milestones, &mut path.report);
        }
        PathKind::Vertical => {
            if region.kind(anchor) == NodeKind::Black {
                return Err(PathError::BlackAnchor(spec.anchor));
            }
            let deepest = region.max_level() - margin;
            let max_span = (deepest - level + 1) as u64;
            let span = if spec.span == 0 { max_span } else { spec.span };
            if span < 2 {
                return Err(PathError::SpanTooShort { span, min: 2 });
            }
            if span > max_span {
                fit(level + span as u32 - 1)?;
            }
            let mut ray = vec![anchor];
            for _ in 1..span {
                let top = *ray.last().unwrap();
                ray.push(region.sons(top)[1]);
            }
            path.s2 = ray.iter().map(|&c| region.pred(c)).collect();
            path.s1 = ray;
            for &c in &path.s1 {
                path.config.set(c, State::Green);
            }
            for &c in &path.s2 {
                path.config.set(c, State::Blue);
            }
            for pair in path.s2.windows(2) {
                if !region.neighbors(pair[0]).contains(&pair[1]) {
                    path.report.push(format!(
                        "blue line breaks between {} and {}",
                        region.cell_id(pair[0]),
                        region.cell_id(pair[1])
                    ));
                }
            }
            path.report.push(
                "vertical running track undetermined; the locomotive cannot be placed here".into(),
            );
        }
        PathKind::SlipRoad => {
            if spec.span != 0 {
                return Err(PathError::ClosedRing { kind: "slip road".into() });
            }
            fit(level + 3)?;
            path.s1 = region.ring(level).collect();
            path.s2 = region.ring(level + 1).collect();
            path.s3 = region.ring(level + 2).collect();
            for &c in &path.s1 {
                path.config.set(c, State::Green);
            }
            for &c in &path.s2 {
                path.config.set(c, State::Blue);
            }
            // junction mark: a triangle of three mutually adjacent blue
            // cells around one vertex of the anchor's safeguard position
            let below = region.sons(anchor_descendant(region, anchor, level + 3))[0];
            let a = if below == EXTERIOR { region.ring(level + 3).start } else { below };
            let b = region.succ(a);
            let shared = shared_neighbor(region, a, b);
            for &c in [a, b, shared].iter().filter(|&&c| c != EXTERIOR) {
                path.config.set(c, State::Blue);
                path.milestones.push(c);
                path.s4.push(c);
            }
            path.report.push("slip-road layout is a reduced-track candidate".into());
        }
    }
    Ok(path)
}

/// The descendant of `from` sitting on `level`, following first sons.
fn anchor_descendant(region: &Region, from: u32, level: u32) -> u32 {
    let mut c = from;
    while region.level(c) < level {
        let fs = region.sons(c)[0];
        if fs == EXTERIOR {
            return c;
        }
        c = fs;
    }
    c
}

/// A third cell adjacent to both, if any (the vertex rule gives one for
/// ring neighbors).
fn shared_neighbor(region: &Region, a: u32, b: u32) -> u32 {
    let nb = region.neighbors(b);
    region
        .neighbors(a)
        .into_iter()
        .find(|&n| n != EXTERIOR && n != a && n != b && nb.contains(&n))
        .unwrap_or(EXTERIOR)
}

fn check_milestones(
    region: &Region,
    s3: &[u32],
    s4: &[u32],
    milestones: &[u32],
    report: &mut Vec<String>,
) {
    let on_s3 = |c: u32| s3.binary_search(&c).is_ok();
    for &c in s4 {
        let touches = region
            .neighbors(c)
            .into_iter()
            .filter(|&n| n != EXTERIOR && on_s3(n))
            .count();
        let want = if milestones.binary_search(&c).is_ok() { 2 } else { 1 };
        if touches != want {
            report.push(format!(
                "{} has {} running-track neighbours, expected {}",
                region.cell_id(c),
                touches,
                want
            ));
        }
    }
}

/// Puts the two-cell locomotive onto a built horizontal path: a blue front
/// at `position` on the running track and a red rear on the cell behind it
/// per the path's direction.
pub fn place_locomotive(
    region: &Region,
    path: &BuiltPath,
    position: usize,
) -> Result<Configuration, PathError> {
    let _ = region;
    if path.spec.kind != PathKind::Horizontal {
        return Err(PathError::LocomotiveUnsupported);
    }
    let track = path.track();
    if track.is_empty() || position >= track.len() {
        return Err(PathError::OffTrack { position, len: track.len() });
    }
    let n = track.len();
    let rear = match path.spec.direction {
        Direction::Asc => track[(position + n - 1) % n],
        Direction::Desc => track[(position + 1) % n],
    };
    let mut config = path.config.clone();
    config.set(track[position], State::Blue);
    config.set(rear, State::Red);
    Ok(config)
}

// --- the 1-row motion oracle ------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotionError {
    #[error("the line must be blank except for one red-then-blue locomotive: {0}")]
    Malformed(String),
}

/// Steps a blank 1-row track carrying at most one two-cell locomotive.
///
/// Four rules fire on (left, self, right) triples; everything else is
/// unchanged. For ascending travel the front is the blue cell on the
/// greater index and the rules read `B W W -> B`, `R B W -> R`,
/// `W R B -> W`, `W W R -> W`; descending travel mirrors them. Cells beyond
/// the ends read as white. Returns the whole trace, the given line first.
pub fn oracle_motion_1d(
    line: &[State],
    steps: usize,
    direction: Direction,
) -> Result<Vec<Vec<State>>, MotionError> {
    use State::{Blue as B, Red as R, White as W};
    let occupied: Vec<usize> = (0..line.len()).filter(|&i| line[i] != W).collect();
    let ok = match occupied.as_slice() {
        [] => true,
        &[a, b] if b == a + 1 => match direction {
            Direction::Asc => line[a] == R && line[b] == B,
            Direction::Desc => line[a] == B && line[b] == R,
        },
        _ => false,
    };
    if !ok {
        let drawn: String = line.iter().map(|s| s.letter()).collect();
        return Err(MotionError::Malformed(drawn));
    }
    let mut trace = vec![line.to_vec()];
    for _ in 0..steps {
        let prev = trace.last().unwrap();
        let at = |i: isize| {
            if (0..prev.len() as isize).contains(&i) {
                prev[i as usize]
            } else {
                W
            }
        };
        let next = (0..prev.len())
            .map(|i| {
                let (mut l, s, mut r) = (at(i as isize - 1), prev[i], at(i as isize + 1));
                if direction == Direction::Desc {
                    std::mem::swap(&mut l, &mut r);
                }
                match (l, s, r) {
                    (B, W, W) => B,
                    (R, B, W) => R,
                    (W, R, B) => W,
                    (W, W, R) => W,
                    _ => s,
                }
            })
            .collect();
        trace.push(next);
    }
    Ok(trace)
}

// --- scenarios ---------------------------------------------------------

/// What a scenario file asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Path(PathKind),
    Crossing,
    Switch { kind: SwitchKind, side: Side },
}

/// A parsed scenario: a layout kind with its placement parameters and an
/// optional locomotive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub anchor: CellId,
    pub span: u64,
    pub direction: Direction,
    /// Track position for the locomotive's front, if any.
    pub locomotive: Option<usize>,
}

/// The available scenario kinds with one-line descriptions.
pub fn scenario_kinds() -> &'static [(&'static str, &'static str)] {
    &[
        ("horizontal", "ring track on four consecutive levels; supports a locomotive"),
        ("vertical", "green middle-son ray with its blue companion line (idle only)"),
        ("sliproad", "reduced ring track with a milestone triangle at the junction"),
        ("crossing", "two tracks crossing at a blank centre (candidate layout)"),
        ("switch-fixed-left", "fixed switch scaffold, left-hand (candidate layout)"),
        ("switch-fixed-right", "fixed switch scaffold, right-hand (candidate layout)"),
        ("switch-flip-flop-left", "flip-flop switch scaffold, left-hand (candidate layout)"),
        ("switch-flip-flop-right", "flip-flop switch scaffold, right-hand (candidate layout)"),
        ("switch-memory-left", "memory switch scaffold, left-hand (candidate layout)"),
        ("switch-memory-right", "memory switch scaffold, right-hand (candidate layout)"),
    ]
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("a scenario needs a kind= line")]
    MissingKind,
}

/// Reads a scenario from `key=value` lines: `kind` (required), `anchor`,
/// `span`, `direction`, `locomotive`. `#` starts a comment.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut kind: Option<ScenarioKind> = None;
    let mut anchor: Option<CellId> = None;
    let mut span = 0u64;
    let mut direction = Direction::Asc;
    let mut locomotive = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| ScenarioError::Parse { line, message };
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err("expected key=value".into()))?;
        match key {
            "kind" => kind = Some(parse_kind(value).map_err(err)?),
            "anchor" => anchor = Some(value.parse().map_err(|e| err(format!("{e}")))?),
            "span" => span = value.parse().map_err(|_| err(format!("bad span {value:?}")))?,
            "direction" => direction = value.parse().map_err(err)?,
            "locomotive" => {
                locomotive =
                    Some(value.parse().map_err(|_| err(format!("bad position {value:?}")))?)
            }
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    let kind = kind.ok_or(ScenarioError::MissingKind)?;
    let anchor = anchor.unwrap_or(match kind {
        // ring layouts start on level 1; the vertical ray starts at the
        // first root's middle son
        ScenarioKind::Path(PathKind::Vertical) => CellId::InSector { sector: 1, nu: 3 },
        _ => CellId::InSector { sector: 1, nu: 2 },
    });
    Ok(Scenario { kind, anchor, span, direction, locomotive })
}

fn parse_kind(value: &str) -> Result<ScenarioKind, String> {
    if let Some(rest) = value.strip_prefix("switch-") {
        let (kind, side) = rest
            .rsplit_once('-')
            .ok_or_else(|| format!("bad switch kind {value:?}"))?;
        let kind = match kind {
            "fixed" => SwitchKind::Fixed,
            "flip-flop" => SwitchKind::FlipFlop,
            "memory" => SwitchKind::Memory,
            other => return Err(format!("unknown switch kind {other:?}")),
        };
        let side = match side {
            "left" => Side::Left,
            "right" => Side::Right,
            other => return Err(format!("unknown side {other:?}")),
        };
        return Ok(ScenarioKind::Switch { kind, side });
    }
    match value {
        "horizontal" => Ok(ScenarioKind::Path(PathKind::Horizontal)),
        "vertical" => Ok(ScenarioKind::Path(PathKind::Vertical)),
        "sliproad" => Ok(ScenarioKind::Path(PathKind::SlipRoad)),
        "crossing" => Ok(ScenarioKind::Crossing),
        other => Err(format!("unknown kind {other:?}")),
    }
}

/// A realized scenario: the configuration to simulate plus build notes.
#[derive(Debug, Clone)]
pub struct ScenarioBuild {
    pub config: Configuration,
    pub report: Vec<String>,
    /// Present for path scenarios.
    pub path: Option<BuiltPath>,
}

/// Builds the configuration a scenario describes.
pub fn build_scenario(region: &Region, scenario: &Scenario) -> Result<ScenarioBuild, PathError> {
    match scenario.kind {
        ScenarioKind::Path(kind) => {
            let spec = PathSpec {
                kind,
                anchor: scenario.anchor,
                span: scenario.span,
                direction: scenario.direction,
            };
            let path = build_path(region, spec)?;
            let config = match scenario.locomotive {
                Some(position) => place_locomotive(region, &path, position)?,
                None => path.config.clone(),
            };
            Ok(ScenarioBuild { config, report: path.report.clone(), path: Some(path) })
        }
        ScenarioKind::Crossing => {
            let (config, report) = crossing_candidate(region, scenario.anchor)?;
            Ok(ScenarioBuild { config, report, path: None })
        }
        ScenarioKind::Switch { kind, side } => {
            let (config, report) = switch_candidate(region, scenario.anchor, kind, side)?;
            Ok(ScenarioBuild { config, report, path: None })
        }
    }
}

// --- junction scaffolds -------------------------------------------------
//
// The source material describes junction layouts only through constraints
// on the centre cell's neighborhood (the figures are not available), so
// these builders emit a candidate configuration together with a report of
// which constraints it meets. They are exploration aids, not verified
// layouts: run them under a rule table to judge them.

/// A candidate track crossing: a blank centre whose vertical neighbours
/// (father and middle son) are green, with the lateral ring cells left
/// blank for the horizontal track.
pub fn crossing_candidate(
    region: &Region,
    anchor: CellId,
) -> Result<(Configuration, Vec<String>), PathError> {
    let centre = region
        .index_of(anchor)
        .ok_or(PathError::AnchorOutsideRegion(anchor))?;
    let level = region.level(centre);
    if centre == 0 || level + 1 + 2 > region.max_level() {
        return Err(PathError::DoesNotFit { needed: level + 1, max_level: region.max_level() });
    }
    let mut config = Configuration::new();
    let nbrs = region.neighbors(centre);
    let vertical = [nbrs[0], region.sons(centre)[1]];
    for c in vertical {
        config.set(c, State::Green);
    }
    let mut report = vec!["crossing layout is a constraint-driven candidate".to_string()];
    let greens = nbrs
        .iter()
        .filter(|&&n| n != EXTERIOR && config.get(n) == State::Green)
        .count();
    if greens != 2 {
        report.push(format!("centre has {greens} green neighbours, expected 2"));
    }
    // an idle cell: some neighbour with three consecutive blank slots
    let has_idle = nbrs.iter().any(|&n| {
        n != EXTERIOR && {
            let ring = region.neighbors(n);
            (0..7).any(|k| {
                (0..3).all(|d| {
                    let c = ring[(k + d) % 7];
                    c != EXTERIOR && config.get(c) == State::White
                })
            })
        }
    });
    if !has_idle {
        report.push("no neighbour has three consecutive blank neighbours".into());
    }
    Ok((config, report))
}

/// A candidate switch scaffold around a blank centre. Memory switches get
/// five green neighbours; fixed ones get the two vertical greens plus a
/// blue milestone; flip-flops additionally carry their red marker. `side`
/// mirrors the markers between the predecessor and successor sides.
pub fn switch_candidate(
    region: &Region,
    anchor: CellId,
    kind: SwitchKind,
    side: Side,
) -> Result<(Configuration, Vec<String>), PathError> {
    let centre = region
        .index_of(anchor)
        .ok_or(PathError::AnchorOutsideRegion(anchor))?;
    let level = region.level(centre);
    if centre == 0 || level + 1 + 2 > region.max_level() {
        return Err(PathError::DoesNotFit { needed: level + 1, max_level: region.max_level() });
    }
    let nbrs = region.neighbors(centre);
    let marker_slot = match side {
        Side::Left => 1,  // predecessor side
        Side::Right => 6, // successor side
    };
    let mut config = Configuration::new();
    let mut report = vec![format!(
        "switch scaffold is a constraint-driven candidate ({} branches {})",
        match kind {
            SwitchKind::Fixed => "fixed",
            SwitchKind::FlipFlop => "flip-flop",
            SwitchKind::Memory => "memory",
        },
        match side {
            Side::Left => "left",
            Side::Right => "right",
        }
    )];
    match kind {
        SwitchKind::Memory => {
            // five green neighbours of the centre
            for &n in nbrs.iter().take(5) {
                config.set(n, State::Green);
            }
            let greens = nbrs
                .iter()
                .filter(|&&n| n != EXTERIOR && config.get(n) == State::Green)
                .count();
            if greens != 5 {
                report.push(format!("centre has {greens} green neighbours, expected 5"));
            }
        }
        SwitchKind::Fixed | SwitchKind::FlipFlop => {
            config.set(nbrs[0], State::Green);
            config.set(region.sons(centre)[1], State::Green);
            config.set(nbrs[marker_slot], State::Blue);
            if kind == SwitchKind::FlipFlop {
                let marker = region.neighbors(nbrs[marker_slot])[0];
                config.set(marker, State::Red);
                if config.get(marker) != State::Red {
                    report.push("red marker cell could not be placed".into());
                }
            }
        }
    }
    Ok((config, report))
}
