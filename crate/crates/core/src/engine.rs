//! Single-tile growth: frontiers, windowed runs, black-set readout,
//! bounded enumeration of producible assemblies and directedness checks.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geom::{Vec2, Window};
use crate::model::{Assembly, Direction, Placement, TileAssemblySystem, TileId, TileSet};

/// Attachable `(pos, tile)` pairs, sorted row-major then by tile name.
pub type Frontier = Vec<Placement>;

/// Lattice points carrying black tiles.
pub type BlackSet = BTreeSet<Vec2>;

/// Tiles that can attach at the empty position `p` of `asm`.
fn attachable_at(sys: &TileAssemblySystem, asm: &Assembly, p: Vec2) -> Vec<TileId> {
    let tiles = sys.tiles();
    let mut acc: BTreeMap<TileId, u32> = BTreeMap::new();
    for d in Direction::ALL {
        if let Some(s) = asm.get(p + d.offset()) {
            for &(t, st) in tiles.partners(s, d.opposite()) {
                *acc.entry(t).or_default() += st;
            }
        }
    }
    acc.into_iter()
        .filter(|&(_, s)| s >= sys.temperature())
        .map(|(t, _)| t)
        .collect()
}

fn sort_key(tiles: &TileSet, pl: &Placement) -> (i64, i64, u32) {
    (pl.pos.y, pl.pos.x, tiles.name_rank(pl.tile))
}

/// Every `(p, t)` with `p` adjacent to `asm` and `t` able to attach there.
pub fn frontier(sys: &TileAssemblySystem, asm: &Assembly) -> Frontier {
    let mut empty_neighbours = BTreeSet::new();
    for p in asm.positions() {
        for d in Direction::ALL {
            let q = p + d.offset();
            if !asm.is_occupied(q) {
                empty_neighbours.insert(q);
            }
        }
    }
    let mut out: Frontier = empty_neighbours
        .into_iter()
        .flat_map(|q| {
            attachable_at(sys, asm, q)
                .into_iter()
                .map(move |t| Placement::new(q, t))
        })
        .collect();
    out.sort_by_key(|pl| sort_key(sys.tiles(), pl));
    out
}

/// `asm` extended by `t` at `p`; the input is left untouched.
pub fn attach(sys: &TileAssemblySystem, asm: &Assembly, p: Vec2, t: TileId) -> Result<Assembly> {
    if !sys.can_attach(asm, p, t)? {
        return Err(Error::IllegalAttachment {
            pos: p,
            tile: sys.tiles().tile(t).name.clone(),
        });
    }
    let mut next = asm.clone();
    next.insert(p, t)?;
    Ok(next)
}

/// Which frontier element a windowed run attaches next.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Least `(y, x, tile name)`.
    #[default]
    Least,
    /// Greatest `(y, x, tile name)`.
    Greatest,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub assembly: Assembly,
    /// Attachments after the seed, in order.
    pub trace: Vec<Placement>,
    /// Budget ran out while in-window attachments remained.
    pub exhausted: bool,
}

/// Grow from the seed inside `w`, one deterministic attachment at a time,
/// until nothing attaches inside the window or `step_budget` attachments
/// have been made.
pub fn run_to_quiescence(
    sys: &TileAssemblySystem,
    w: &Window,
    step_budget: usize,
) -> Result<RunOutcome> {
    run_with(sys, w, step_budget, TieBreak::Least)
}

pub fn run_with(
    sys: &TileAssemblySystem,
    w: &Window,
    step_budget: usize,
    order: TieBreak,
) -> Result<RunOutcome> {
    if let Some(p) = sys.seed().positions().find(|&p| !w.contains(p)) {
        return Err(Error::SeedOutsideWindow { pos: p, window: *w });
    }
    let tiles = sys.tiles();
    let mut asm = sys.seed().clone();
    // candidates keyed by (y, x, name rank)
    let mut queue: BTreeSet<(i64, i64, u32, TileId)> = BTreeSet::new();
    let mut at: HashMap<Vec2, Vec<TileId>> = HashMap::new();

    let refresh = |asm: &Assembly,
                   q: Vec2,
                   queue: &mut BTreeSet<(i64, i64, u32, TileId)>,
                   at: &mut HashMap<Vec2, Vec<TileId>>| {
        if let Some(old) = at.remove(&q) {
            for t in old {
                queue.remove(&(q.y, q.x, tiles.name_rank(t), t));
            }
        }
        if !w.contains(q) || asm.is_occupied(q) {
            return;
        }
        let ts = attachable_at(sys, asm, q);
        for &t in &ts {
            queue.insert((q.y, q.x, tiles.name_rank(t), t));
        }
        if !ts.is_empty() {
            at.insert(q, ts);
        }
    };

    let seed_neighbours: BTreeSet<Vec2> = asm
        .positions()
        .flat_map(|p| Direction::ALL.map(|d| p + d.offset()))
        .collect();
    for q in seed_neighbours {
        refresh(&asm, q, &mut queue, &mut at);
    }

    let mut trace = Vec::new();
    let exhausted = loop {
        let next = match order {
            TieBreak::Least => queue.first().copied(),
            TieBreak::Greatest => queue.last().copied(),
        };
        let Some((y, x, _, t)) = next else {
            break false;
        };
        if trace.len() >= step_budget {
            break true;
        }
        let p = Vec2::new(x, y);
        asm.insert(p, t)?;
        trace.push(Placement::new(p, t));
        refresh(&asm, p, &mut queue, &mut at);
        for d in Direction::ALL {
            refresh(&asm, p + d.offset(), &mut queue, &mut at);
        }
    };
    Ok(RunOutcome {
        assembly: asm,
        trace,
        exhausted,
    })
}

pub fn black_set(tiles: &TileSet, asm: &Assembly) -> BlackSet {
    asm.placements()
        .filter(|pl| tiles.tile(pl.tile).black)
        .map(|pl| pl.pos)
        .collect()
}

/// Breadth-first enumeration of the producible assemblies inside a window,
/// one size level at a time. Each assembly is yielded exactly once.
pub struct Producible<'a> {
    sys: &'a TileAssemblySystem,
    window: Window,
    max_size: usize,
    cap: usize,
    stored: usize,
    level: Vec<Assembly>,
    cursor: usize,
    failed: bool,
}

/// Every producible assembly within `w` with at most `max_size` tiles.
///
/// Yields `BudgetExceeded` (once, then stops) if more than `cap` distinct
/// assemblies would have to be held.
pub fn enumerate_producible<'a>(
    sys: &'a TileAssemblySystem,
    w: &Window,
    max_size: usize,
    cap: usize,
) -> Producible<'a> {
    let seed_inside = sys.seed().positions().all(|p| w.contains(p));
    let level = if seed_inside && sys.seed().len() <= max_size {
        vec![sys.seed().clone()]
    } else {
        Vec::new()
    };
    Producible {
        sys,
        window: *w,
        max_size,
        cap,
        stored: level.len(),
        level,
        cursor: 0,
        failed: false,
    }
}

impl Producible<'_> {
    fn advance_level(&mut self) -> Result<()> {
        let mut next: HashSet<Assembly> = HashSet::new();
        let mut ordered = Vec::new();
        for asm in &self.level {
            if asm.len() >= self.max_size {
                continue;
            }
            for pl in frontier(self.sys, asm) {
                if !self.window.contains(pl.pos) {
                    continue;
                }
                let mut grown = asm.clone();
                grown.insert(pl.pos, pl.tile)?;
                if !next.contains(&grown) {
                    self.stored += 1;
                    if self.stored > self.cap {
                        return Err(Error::BudgetExceeded(self.cap));
                    }
                    next.insert(grown.clone());
                    ordered.push(grown);
                }
            }
        }
        ordered.sort_by(|a, b| a.placements().cmp(b.placements()));
        self.level = ordered;
        self.cursor = 0;
        Ok(())
    }
}

impl Iterator for Producible<'_> {
    type Item = Result<Assembly>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if self.cursor >= self.level.len() {
            if self.level.is_empty() {
                return None;
            }
            if let Err(e) = self.advance_level() {
                self.failed = true;
                return Some(Err(e));
            }
            if self.level.is_empty() {
                return None;
            }
        }
        let item = self.level[self.cursor].clone();
        self.cursor += 1;
        Some(Ok(item))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictWitness {
    pub pos: Vec2,
    pub tile_a: TileId,
    pub tile_b: TileId,
    /// Attachments from the seed ending with `tile_a` at `pos`.
    pub trace_a: Vec<Placement>,
    /// Attachments from the seed ending with `tile_b` at `pos`.
    pub trace_b: Vec<Placement>,
}

/// Outcome of the windowed directedness check. "Directed" means that no two
/// producible assemblies inside the window disagree at any position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectednessVerdict {
    Directed,
    Conflict(Box<ConflictWitness>),
    Inconclusive(String),
}

struct WorkBudget {
    left: usize,
}

impl WorkBudget {
    fn spend(&mut self, n: usize) -> bool {
        if n > self.left {
            self.left = 0;
            false
        } else {
            self.left -= n;
            true
        }
    }
}

/// Over-approximation of the placements reachable inside `w`: a tile is
/// reachable at `p` if the strongest reachable neighbour on each side
/// together supply at least the temperature. Exact at temperature 1.
fn reachable_types(
    sys: &TileAssemblySystem,
    w: &Window,
    budget: &mut WorkBudget,
) -> Option<BTreeMap<Vec2, BTreeSet<TileId>>> {
    let tiles = sys.tiles();
    let seed = sys.seed();
    let mut reach: BTreeMap<Vec2, BTreeSet<TileId>> = seed
        .placements()
        .map(|pl| (pl.pos, BTreeSet::from([pl.tile])))
        .collect();
    let mut work: Vec<Placement> = seed.placements().collect();
    while let Some(pl) = work.pop() {
        if !budget.spend(1) {
            return None;
        }
        for d in Direction::ALL {
            let p = pl.pos + d.offset();
            if !w.contains(p) || seed.is_occupied(p) {
                continue;
            }
            for &(t, _) in tiles.partners(pl.tile, d) {
                if reach.get(&p).is_some_and(|s| s.contains(&t)) {
                    continue;
                }
                let support: u32 = Direction::ALL
                    .into_iter()
                    .map(|e| {
                        reach
                            .get(&(p + e.offset()))
                            .map(|ss| {
                                ss.iter()
                                    .map(|&s| tiles.strength(t, s, e))
                                    .max()
                                    .unwrap_or(0)
                            })
                            .unwrap_or(0)
                    })
                    .sum();
                if support >= sys.temperature() {
                    reach.entry(p).or_default().insert(t);
                    work.push(Placement::new(p, t));
                }
            }
        }
    }
    Some(reach)
}

/// Largest producible sub-assembly of `target` that leaves `hole` empty,
/// together with the order its tiles attach in.
fn closure_avoiding(
    sys: &TileAssemblySystem,
    target: &Assembly,
    hole: Vec2,
) -> (Assembly, Vec<Placement>) {
    let tiles = sys.tiles();
    let mut asm = sys.seed().clone();
    let mut order = Vec::new();
    let mut acc: HashMap<Vec2, u32> = HashMap::new();
    let mut ready: BTreeSet<(i64, i64)> = BTreeSet::new();
    let bump = |asm: &Assembly,
                p: Vec2,
                acc: &mut HashMap<Vec2, u32>,
                ready: &mut BTreeSet<(i64, i64)>| {
        let t = asm.get(p).unwrap();
        for d in Direction::ALL {
            let q = p + d.offset();
            if q == hole || asm.is_occupied(q) {
                continue;
            }
            if let Some(s) = target.get(q) {
                let st = tiles.strength(t, s, d);
                if st > 0 {
                    let e = acc.entry(q).or_default();
                    *e += st;
                    if *e >= sys.temperature() {
                        ready.insert((q.y, q.x));
                    }
                }
            }
        }
    };
    let seeds: Vec<Vec2> = asm.positions().collect();
    for p in seeds {
        bump(&asm, p, &mut acc, &mut ready);
    }
    while let Some((y, x)) = ready.pop_first() {
        let p = Vec2::new(x, y);
        let t = target.get(p).unwrap();
        asm.insert(p, t).expect("closure visits each position once");
        order.push(Placement::new(p, t));
        bump(&asm, p, &mut acc, &mut ready);
    }
    (asm, order)
}

/// Decide whether growth confined to `w` is deterministic.
///
/// A reachability fixed point rules out conflicts cheaply. When it cannot,
/// the terminal assembly of one run is computed and every contested
/// position `p` is tested exactly: the maximal producible sub-assembly that
/// avoids `p` either admits a different tile at `p` (a conflict, with both
/// attachment traces) or it does not. `budget` bounds the total number of
/// derivation and attachment steps.
pub fn check_directed(sys: &TileAssemblySystem, w: &Window, budget: usize) -> DirectednessVerdict {
    if let Some(p) = sys.seed().positions().find(|&p| !w.contains(p)) {
        return DirectednessVerdict::Inconclusive(format!("seed position {p} lies outside {w}"));
    }
    let mut work = WorkBudget { left: budget };
    let Some(reach) = reachable_types(sys, w, &mut work) else {
        return DirectednessVerdict::Inconclusive(format!(
            "budget of {budget} exhausted computing reachable placements"
        ));
    };
    if reach.values().all(|ts| ts.len() <= 1) {
        return DirectednessVerdict::Directed;
    }

    let run = match run_to_quiescence(sys, w, work.left) {
        Ok(run) => run,
        Err(e) => return DirectednessVerdict::Inconclusive(e.to_string()),
    };
    if run.exhausted || !work.spend(run.trace.len()) {
        return DirectednessVerdict::Inconclusive(format!(
            "budget of {budget} exhausted growing the reference assembly"
        ));
    }
    let terminal = &run.assembly;
    for (idx, pl) in run.trace.iter().enumerate() {
        let p = pl.pos;
        let Some(options) = reach.get(&p) else {
            continue;
        };
        if options.len() <= 1 {
            continue;
        }
        let (partial, order) = closure_avoiding(sys, terminal, p);
        if !work.spend(order.len() + 1) {
            return DirectednessVerdict::Inconclusive(format!(
                "budget of {budget} exhausted during exact conflict search"
            ));
        }
        for &t in options {
            if t == pl.tile {
                continue;
            }
            if sys.can_attach(&partial, p, t).unwrap_or(false) {
                let mut trace_b = order;
                trace_b.push(Placement::new(p, t));
                return DirectednessVerdict::Conflict(Box::new(ConflictWitness {
                    pos: p,
                    tile_a: pl.tile,
                    tile_b: t,
                    trace_a: run.trace[..=idx].to_vec(),
                    trace_b,
                }));
            }
        }
    }
    DirectednessVerdict::Directed
}

/// Apply `trace` to the seed through [`attach`].
pub fn replay(sys: &TileAssemblySystem, trace: &[Placement]) -> Result<Assembly> {
    trace
        .iter()
        .try_fold(sys.seed().clone(), |asm, pl| attach(sys, &asm, pl.pos, pl.tile))
}
