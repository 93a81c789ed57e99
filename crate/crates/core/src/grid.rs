//! A finite region of the ternary heptagrid: the central cell plus seven
//! Fibonacci sector trees, cut at a maximum level.
//!
//! Construction is an explicit frontier-cycle layering. Level `l` of the
//! region is a closed ribbon of cells around the previous levels, listed
//! sector by sector and left to right within a sector; each cell hands its
//! sons consecutive positions on the next ribbon (two sons for a black node,
//! three for a white one), and lateral edges close by the rule that every
//! vertex of the tiling is shared by exactly three heptagons.
//!
//! Neighbor slots are numbered 1..7 counter-clockwise. For every non-central
//! cell slot 1 is the father; a white cell continues with its ring
//! predecessor, its three sons on slots 3, 4, 5, the first son of its ring
//! successor, and the successor itself; a black cell sees its uncle (the
//! father's predecessor) on slot 2, its predecessor on slot 3, its two sons on
//! slots 4 and 5, then nephew and successor as for white. The central cell's
//! slots 1..7 are the seven sector roots. [`Orientation::Mirrored`] reflects
//! every cell (slots 2..7 reversed), which is the one other assignment
//! compatible with the vertex rule.
//!
//! # Example
//!
//! ```
//! use heptaca_core::grid::{CellId, Region};
//!
//! let region = Region::build(2).unwrap();
//! assert_eq!(region.cell_count(), 85);
//! let root = region.index_of(CellId::InSector { sector: 1, nu: 1 }).unwrap();
//! assert_eq!(region.cell_id(region.neighbors(root)[0]), CellId::Center);
//! assert!(region.verify().is_empty());
//! ```

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fib;

/// Sentinel index for a neighbor slot that falls outside the region.
pub const EXTERIOR: u32 = u32::MAX;

/// Tree color of a cell: black nodes carry 2 sons, white nodes 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    White,
    Black,
}

impl NodeKind {
    /// Number of sons a node of this kind has in the infinite tree.
    pub fn arity(self) -> usize {
        match self {
            NodeKind::White => 3,
            NodeKind::Black => 2,
        }
    }
}

/// Which of the two vertex-rule-compatible slot assignments the region uses.
///
/// `Mirrored` reflects every cell: slot 1 stays the father, slots 2..7 are
/// reversed. It exists because the source material fixes counter-clockwise
/// numbering without fixing which rotational sense the figures use; all
/// shipped scenarios assume `Standard`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Standard,
    Mirrored,
}

/// Identity of a cell: the center, or node ν of one of the seven sectors.
///
/// Sector roots are ν = 1; a level-`l` node has ν in
/// `level_first(l) ..= sector_population(l)`. The derived ordering (center
/// first, then by sector, then by ν) is the canonical iteration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellId {
    Center,
    InSector { sector: u8, nu: u64 },
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellId::Center => f.write_str("C"),
            CellId::InSector { sector, nu } => write!(f, "{sector}:{nu}"),
        }
    }
}

/// Error from parsing a [`CellId`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid cell id {0:?}: expected C or <sector>:<nu> with sector 1..7, nu >= 1")]
pub struct CellIdParseError(pub String);

impl FromStr for CellId {
    type Err = CellIdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "C" {
            return Ok(CellId::Center);
        }
        let bad = || CellIdParseError(s.to_string());
        let (sec, nu) = s.split_once(':').ok_or_else(bad)?;
        let sector: u8 = sec.trim().parse().map_err(|_| bad())?;
        let nu: u64 = nu.trim().parse().map_err(|_| bad())?;
        if !(1..=7).contains(&sector) || nu == 0 {
            return Err(bad());
        }
        Ok(CellId::InSector { sector, nu })
    }
}

/// Errors from region construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("region to level {max_level} holds {needed} cells, over the cap of {cap}")]
    TooManyCells { max_level: u32, needed: u64, cap: u64 },
    #[error("region to level {0} is beyond the addressable size")]
    LevelTooDeep(u32),
}

/// A finite ball of the heptagrid with full 7-neighbor adjacency.
///
/// Cells are addressed by dense indices: 0 is the center, and level `l`
/// occupies one contiguous block per the frontier-cycle order (sector-major,
/// ν ascending — which is also counter-clockwise along the ring). The
/// structure is immutable after construction.
pub struct Region {
    max_level: u32,
    orientation: Orientation,
    /// Per-sector population of each level, `f(2l + 1)`.
    level_pop: Vec<u64>,
    /// First in-sector ν of each level.
    nu_start: Vec<u64>,
    /// Index of the first cell of each ring; one extra entry for the end.
    ring_start: Vec<u32>,
    kind: Vec<NodeKind>,
    father: Vec<u32>,
    first_son: Vec<u32>,
    neighbors: Vec<[u32; 7]>,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("max_level", &self.max_level)
            .field("orientation", &self.orientation)
            .field("cells", &self.cell_count())
            .finish_non_exhaustive()
    }
}

impl Region {
    /// Builds the region of every cell at tree level ≤ `max_level`, standard
    /// orientation, no cell cap.
    pub fn build(max_level: u32) -> Result<Region, GridError> {
        Self::build_oriented(max_level, Orientation::Standard, None)
    }

    /// Builds a region with an explicit orientation and an optional cap on
    /// the total cell count.
    pub fn build_oriented(
        max_level: u32,
        orientation: Orientation,
        max_cells: Option<u64>,
    ) -> Result<Region, GridError> {
        let deep = || GridError::LevelTooDeep(max_level);
        let needed = fib::region_population(max_level).map_err(|_| deep())?;
        if let Some(cap) = max_cells {
            if needed > cap {
                return Err(GridError::TooManyCells { max_level, needed, cap });
            }
        }
        if needed >= EXTERIOR as u64 {
            return Err(deep());
        }

        let levels = max_level as usize + 1;
        let mut level_pop = Vec::with_capacity(levels);
        let mut nu_start = Vec::with_capacity(levels);
        let mut ring_start = Vec::with_capacity(levels + 1);
        ring_start.push(1u32);
        for l in 0..=max_level {
            level_pop.push(fib::level_population(l).map_err(|_| deep())?);
            nu_start.push(fib::level_first(l).map_err(|_| deep())?);
            let ring = 7 * level_pop[l as usize];
            ring_start.push(ring_start[l as usize] + ring as u32);
        }
        let total = needed as usize;

        // Kinds, fathers and son blocks, level by level. Sons take
        // consecutive slots on the next ring, black before white.
        let mut kind = vec![NodeKind::White; total];
        let mut father = vec![EXTERIOR; total];
        let mut first_son = vec![EXTERIOR; total];
        for root in 1..8 {
            father[root] = 0;
        }
        for l in 0..max_level as usize {
            let mut next = ring_start[l + 1];
            for c in ring_start[l]..ring_start[l + 1] {
                first_son[c as usize] = next;
                kind[next as usize] = NodeKind::Black;
                kind[next as usize + 1] = NodeKind::White;
                if kind[c as usize] == NodeKind::White {
                    kind[next as usize + 2] = NodeKind::White;
                }
                for s in 0..kind[c as usize].arity() as u32 {
                    father[(next + s) as usize] = c;
                }
                next += kind[c as usize].arity() as u32;
            }
            debug_assert_eq!(next, ring_start[l + 2]);
        }

        let mut region = Region {
            max_level,
            orientation,
            level_pop,
            nu_start,
            ring_start,
            kind,
            father,
            first_son,
            neighbors: Vec::new(),
        };

        let mut neighbors = vec![[EXTERIOR; 7]; total];
        neighbors[0] = [1, 2, 3, 4, 5, 6, 7];
        for l in 0..=max_level {
            for c in region.ring(l) {
                let fa = region.father[c as usize];
                let pr = region.pred(c);
                let su = region.succ(c);
                let nephew = region.first_son[su as usize];
                let fs = region.first_son[c as usize];
                let son = |k: u32| if fs == EXTERIOR { EXTERIOR } else { fs + k };
                let mut slots = match region.kind[c as usize] {
                    NodeKind::White => [fa, pr, son(0), son(1), son(2), nephew, su],
                    // uncle: the father's ring predecessor (fathers of black
                    // cells are never the center, so pred is defined)
                    NodeKind::Black => [fa, region.pred(fa), pr, son(0), son(1), nephew, su],
                };
                if orientation == Orientation::Mirrored {
                    slots[1..7].reverse();
                }
                neighbors[c as usize] = slots;
            }
        }
        region.neighbors = neighbors;
        Ok(region)
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn cell_count(&self) -> usize {
        *self.ring_start.last().unwrap() as usize
    }

    /// Index range of ring `level`.
    pub fn ring(&self, level: u32) -> std::ops::Range<u32> {
        self.ring_start[level as usize]..self.ring_start[level as usize + 1]
    }

    pub fn ring_len(&self, level: u32) -> u32 {
        self.ring(level).len() as u32
    }

    /// Tree level of a cell; the center counts as level 0.
    pub fn level(&self, idx: u32) -> u32 {
        debug_assert!((idx as usize) < self.cell_count());
        if idx == 0 {
            return 0;
        }
        self.ring_start.partition_point(|&s| s <= idx) as u32 - 1
    }

    /// Whether the cell has Exterior neighbor slots (it sits on the last ring).
    pub fn is_rim(&self, idx: u32) -> bool {
        idx != 0 && self.level(idx) == self.max_level
    }

    pub fn kind(&self, idx: u32) -> NodeKind {
        self.kind[idx as usize]
    }

    /// The cell's 7 neighbor slots in canonical order; entries may be
    /// [`EXTERIOR`].
    pub fn neighbors(&self, idx: u32) -> [u32; 7] {
        self.neighbors[idx as usize]
    }

    /// Ring predecessor (clockwise neighbor on the same level). Not defined
    /// for the center.
    pub fn pred(&self, idx: u32) -> u32 {
        debug_assert_ne!(idx, 0);
        let ring = self.ring(self.level(idx));
        if idx == ring.start {
            ring.end - 1
        } else {
            idx - 1
        }
    }

    /// Ring successor (counter-clockwise). Not defined for the center.
    pub fn succ(&self, idx: u32) -> u32 {
        debug_assert_ne!(idx, 0);
        let ring = self.ring(self.level(idx));
        if idx == ring.end - 1 {
            ring.start
        } else {
            idx + 1
        }
    }

    /// Tree father; `None` for the center.
    pub fn father(&self, idx: u32) -> Option<u32> {
        (idx != 0).then(|| self.father[idx as usize])
    }

    /// First son, or `None` on the rim. Sons occupy consecutive indices.
    pub fn first_son(&self, idx: u32) -> Option<u32> {
        let fs = self.first_son[idx as usize];
        (fs != EXTERIOR).then_some(fs)
    }

    /// Son slots in side order. Unused entries (the third slot of a black
    /// cell, every slot on the rim) hold [`EXTERIOR`].
    pub fn sons(&self, idx: u32) -> [u32; 3] {
        let mut out = [EXTERIOR; 3];
        if let Some(fs) = self.first_son(idx) {
            for (k, slot) in out.iter_mut().enumerate().take(self.kind(idx).arity()) {
                *slot = fs + k as u32;
            }
        }
        out
    }

    /// Dense index of a cell id, if it lies in the region.
    pub fn index_of(&self, id: CellId) -> Option<u32> {
        match id {
            CellId::Center => Some(0),
            CellId::InSector { sector, nu } => {
                if !(1..=7).contains(&sector) || nu == 0 {
                    return None;
                }
                let level = self.nu_start.partition_point(|&s| s <= nu) - 1;
                let pop = self.level_pop[level];
                let offset = nu - self.nu_start[level];
                if offset >= pop {
                    return None; // past the last level
                }
                let pos = (sector as u64 - 1) * pop + offset;
                Some(self.ring_start[level] + pos as u32)
            }
        }
    }

    /// Cell id of a dense index.
    pub fn cell_id(&self, idx: u32) -> CellId {
        if idx == 0 {
            return CellId::Center;
        }
        let level = self.level(idx) as usize;
        let pos = (idx - self.ring_start[level]) as u64;
        let pop = self.level_pop[level];
        CellId::InSector {
            sector: (pos / pop) as u8 + 1,
            nu: self.nu_start[level] + pos % pop,
        }
    }

    /// All cell indices in [`CellId`] order: center, then sector by sector
    /// with ν ascending. This is the canonical sweep order for prompts and
    /// reports.
    pub fn cells_in_id_order(&self) -> impl Iterator<Item = u32> + '_ {
        let per_sector = std::iter::once(0).chain((1..=7u32).flat_map(move |sector| {
            (0..=self.max_level).flat_map(move |l| {
                let pop = self.level_pop[l as usize] as u32;
                let base = self.ring_start[l as usize] + (sector - 1) * pop;
                base..base + pop
            })
        }));
        per_sector
    }

    /// Checks every structural invariant by exhaustive scan and returns the
    /// violations; an empty report is a pass.
    pub fn verify(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let n = self.cell_count() as u32;
        let mut report = |msg: String| {
            if bad.len() < 64 {
                bad.push(msg);
            }
        };

        if self.neighbors[0] != [1, 2, 3, 4, 5, 6, 7] {
            report("center's slots are not the seven sector roots".into());
        }
        for c in 0..n {
            let slots = self.neighbors(c);
            for (k, &s) in slots.iter().enumerate() {
                if s == EXTERIOR {
                    if !self.is_rim(c) {
                        report(format!("{}: interior cell has Exterior slot {}", self.cell_id(c), k + 1));
                    }
                    continue;
                }
                if s >= n {
                    report(format!("{}: slot {} out of range", self.cell_id(c), k + 1));
                    continue;
                }
                if s == c {
                    report(format!("{}: slot {} points at the cell itself", self.cell_id(c), k + 1));
                }
                if !self.neighbors(s).contains(&c) {
                    report(format!(
                        "{}: slot {} = {} is not symmetric",
                        self.cell_id(c),
                        k + 1,
                        self.cell_id(s)
                    ));
                }
            }
            let interior: Vec<u32> = slots.iter().copied().filter(|&s| s != EXTERIOR).collect();
            let mut dedup = interior.clone();
            dedup.sort_unstable();
            dedup.dedup();
            if dedup.len() != interior.len() {
                report(format!("{}: repeated neighbor", self.cell_id(c)));
            }
            // father on slot 1
            if c != 0 && slots[0] != self.father[c as usize] {
                report(format!("{}: slot 1 is not the father", self.cell_id(c)));
            }
            // vertex rule: consecutive slots share an edge, so each tiling
            // vertex interior to the region has exactly 3 heptagons around it
            for k in 0..7 {
                let a = slots[k];
                let b = slots[(k + 1) % 7];
                if a == EXTERIOR || b == EXTERIOR {
                    continue;
                }
                if !self.neighbors(a).contains(&b) {
                    report(format!(
                        "{}: slots {} and {} ({} and {}) are not adjacent",
                        self.cell_id(c),
                        k + 1,
                        (k + 1) % 7 + 1,
                        self.cell_id(a),
                        self.cell_id(b)
                    ));
                }
            }
            // father/sons identity
            if let Some(fs) = self.first_son(c) {
                for k in 0..self.kind(c).arity() as u32 {
                    if self.father[(fs + k) as usize] != c {
                        report(format!("{}: son {} disowns it", self.cell_id(c), self.cell_id(fs + k)));
                    }
                }
            }
        }
        // censuses: ring l holds 7·f(2l-1) black and 7·f(2l) white cells
        for l in 0..=self.max_level {
            let blacks = self.ring(l).filter(|&c| self.kind(c) == NodeKind::Black).count() as u64;
            let whites = self.ring_len(l) as u64 - blacks;
            let want_black = if l == 0 { 0 } else { 7 * fib::fib(2 * l - 1).unwrap() };
            let want_white = if l == 0 { 7 } else { 7 * fib::fib(2 * l).unwrap() };
            if blacks != want_black || whites != want_white {
                report(format!(
                    "ring {l}: census {blacks} black / {whites} white, expected {want_black} / {want_white}"
                ));
            }
            // a black cell is never followed by a black cell along the ring
            for c in self.ring(l) {
                if self.kind(c) == NodeKind::Black && self.kind(self.succ(c)) == NodeKind::Black {
                    report(format!("ring {l}: adjacent black cells at {}", self.cell_id(c)));
                }
            }
        }
        if self.cell_count() as u64 != fib::region_population(self.max_level).unwrap() {
            report("total cell count disagrees with the population formula".into());
        }
        bad
    }

    /// Diagnostic dump: one line per cell in [`CellId`] order,
    /// `id kind slot1..slot7`, with `X` marking Exterior and `C` the center.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for c in self.cells_in_id_order() {
            let kind = match (c, self.kind(c)) {
                (0, _) => "C",
                (_, NodeKind::White) => "W",
                (_, NodeKind::Black) => "B",
            };
            write!(out, "{} {}", self.cell_id(c), kind).unwrap();
            for s in self.neighbors(c) {
                if s == EXTERIOR {
                    out.push_str(" X");
                } else {
                    write!(out, " {}", self.cell_id(s)).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_counts_match_population_formula() {
        for (level, want) in [(0, 8), (1, 29), (2, 85), (3, 232), (4, 617), (5, 1625)] {
            let region = Region::build(level).unwrap();
            assert_eq!(region.cell_count(), want, "level {level}");
        }
    }

    #[test]
    fn regions_verify_clean_in_both_orientations() {
        for level in 0..=4 {
            for orientation in [Orientation::Standard, Orientation::Mirrored] {
                let region = Region::build_oriented(level, orientation, None).unwrap();
                let report = region.verify();
                assert!(report.is_empty(), "level {level} {orientation:?}: {report:?}");
            }
        }
    }

    #[test]
    fn id_and_index_are_inverse() {
        let region = Region::build(4).unwrap();
        for idx in 0..region.cell_count() as u32 {
            let id = region.cell_id(idx);
            assert_eq!(region.index_of(id), Some(idx), "{id}");
        }
        assert_eq!(region.index_of(CellId::Center), Some(0));
        assert_eq!(region.index_of(CellId::InSector { sector: 8, nu: 1 }), None);
        assert_eq!(region.index_of(CellId::InSector { sector: 1, nu: 0 }), None);
        // first ν past the region
        let past = fib::sector_population(4).unwrap() + 1;
        assert_eq!(region.index_of(CellId::InSector { sector: 1, nu: past }), None);
    }

    #[test]
    fn roots_hang_off_the_center() {
        let region = Region::build(1).unwrap();
        for sector in 1..=7u8 {
            let root = region.index_of(CellId::InSector { sector, nu: 1 }).unwrap();
            assert_eq!(region.neighbors(root)[0], 0);
            assert_eq!(region.father(root), Some(0));
            assert_eq!(region.kind(root), NodeKind::White);
        }
        assert_eq!(region.father(0), None);
        // the first son of the root of sector 1 is 1:2
        let root = region.index_of(CellId::InSector { sector: 1, nu: 1 }).unwrap();
        let sons = region.sons(root);
        assert_eq!(region.cell_id(sons[0]), CellId::InSector { sector: 1, nu: 2 });
        assert_eq!(region.father(sons[0]), Some(root));
    }

    #[test]
    fn son_kinds_follow_the_substitution() {
        let region = Region::build(3).unwrap();
        for c in 1..region.cell_count() as u32 {
            if region.is_rim(c) {
                assert_eq!(region.sons(c), [EXTERIOR; 3]);
                continue;
            }
            let sons = region.sons(c);
            assert_eq!(region.kind(sons[0]), NodeKind::Black);
            assert_eq!(region.kind(sons[1]), NodeKind::White);
            match region.kind(c) {
                NodeKind::White => assert_eq!(region.kind(sons[2]), NodeKind::White),
                NodeKind::Black => assert_eq!(sons[2], EXTERIOR),
            }
        }
    }

    #[test]
    fn id_order_sweep_touches_every_cell_once() {
        let region = Region::build(3).unwrap();
        let order: Vec<u32> = region.cells_in_id_order().collect();
        assert_eq!(order.len(), region.cell_count());
        let ids: Vec<CellId> = order.iter().map(|&c| region.cell_id(c)).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted, "sweep must be strictly increasing in CellId order");
    }

    #[test]
    fn mirrored_is_the_slotwise_reflection() {
        let standard = Region::build(3).unwrap();
        let mirrored = Region::build_oriented(3, Orientation::Mirrored, None).unwrap();
        for c in 1..standard.cell_count() as u32 {
            let s = standard.neighbors(c);
            let m = mirrored.neighbors(c);
            assert_eq!(s[0], m[0]);
            for k in 1..7 {
                assert_eq!(s[k], m[7 - k], "cell {c} slot {k}");
            }
        }
    }

    #[test]
    fn cell_cap_is_enforced() {
        let err = Region::build_oriented(3, Orientation::Standard, Some(100)).unwrap_err();
        assert_eq!(
            err,
            GridError::TooManyCells { max_level: 3, needed: 232, cap: 100 }
        );
        assert!(Region::build_oriented(3, Orientation::Standard, Some(232)).is_ok());
    }

    #[test]
    fn cell_id_round_trips_through_strings() {
        for id in [CellId::Center, CellId::InSector { sector: 3, nu: 17 }] {
            assert_eq!(id.to_string().parse::<CellId>().unwrap(), id);
        }
        assert!("8:1".parse::<CellId>().is_err());
        assert!("0:4".parse::<CellId>().is_err());
        assert!("1:0".parse::<CellId>().is_err());
        assert!("x".parse::<CellId>().is_err());
    }

    // Fault injections: verify() must notice a corrupted region.
    #[test]
    fn verify_flags_broken_symmetry() {
        let mut region = Region::build(2).unwrap();
        let c = region.ring(1).start as usize;
        region.neighbors[c][6] = region.neighbors[c][5]; // drop an edge, repeat another
        assert!(!region.verify().is_empty());
    }

    #[test]
    fn verify_flags_vertex_violations() {
        let mut region = Region::build(2).unwrap();
        // rewire one root's lateral slot to a far-away ring-2 cell and patch
        // symmetry so only the vertex rule can object
        let a = region.ring(0).start;
        let far = region.ring(2).start + 10;
        region.neighbors[a as usize][6] = far;
        for slot in region.neighbors[far as usize].iter_mut() {
            if *slot == EXTERIOR {
                *slot = a;
                break;
            }
        }
        assert!(!region.verify().is_empty());
    }

    #[test]
    fn dump_lists_every_cell_with_seven_slots() {
        let region = Region::build(1).unwrap();
        let dump = region.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), region.cell_count());
        assert!(lines[0].starts_with("C C 1:1 2:1 3:1 4:1 5:1 6:1 7:1"));
        for line in &lines {
            assert_eq!(line.split_whitespace().count(), 9);
        }
        // rim cells show Exterior son slots
        assert!(dump.contains(" X"));
    }
}
