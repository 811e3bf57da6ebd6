//! Bounded search for a union of at most `K` semi-doubly periodic parts whose
//! trace on a window is exactly a given point set.
//!
//! Candidates are cones `{b + n·u + m·v} ∩ w` contained in the sample, with
//! `b` a sample point and `|u|∞, |v|∞ ≤ B`. A cone is only kept when `b` is
//! maximal for its period pair (neither `b − u` nor `b − v` would also give a
//! valid cone), since the shifted cone contains it. Greedy max-coverage runs
//! first; if it fails an exhaustive branch-and-bound decides the bounded
//! question exactly.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{contains_sdp, corner_range, first_mismatch, gcd, SdpSet, SdpUnion};
use crate::error::{Error, Result};
use crate::geom::{Vec2, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitConfig {
    /// `K`
    pub max_parts: usize,
    /// `B`, bound on the period vectors
    pub max_coord: i64,
    pub candidate_cap: u64,
    pub node_cap: u64,
}

impl FitConfig {
    pub fn new(max_parts: usize, max_coord: i64) -> Self {
        FitConfig {
            max_parts,
            max_coord,
            candidate_cap: 8_000_000,
            node_cap: 50_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitOutcome {
    Found(SdpUnion),
    NoFit,
}

/// The best greedy cover when no exact fit was found by greedy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestMiss {
    pub union: SdpUnion,
    pub uncovered: usize,
    /// Up to 16 uncovered sample points, row-major.
    pub witnesses: Vec<Vec2>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitReport {
    pub outcome: FitOutcome,
    pub window: Window,
    pub max_parts: usize,
    pub max_coord: i64,
    /// Bases are sample points, so `|b|∞` may reach this rather than `B`.
    pub effective_base_bound: i64,
    pub sample_size: usize,
    pub period_pairs: usize,
    pub candidates: usize,
    pub largest_candidate: usize,
    pub greedy_succeeded: bool,
    pub search_nodes: u64,
    pub nearest_miss: Option<NearestMiss>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    Confirmed,
    Mismatch(Vec2),
}

#[derive(Clone, Copy)]
struct Candidate {
    base: u32,
    pair: u32,
    size: u32,
}

/// Period pairs in search order: the singleton pair, rays, then genuine
/// pairs. Within each group, vectors in the closed first quadrant come
/// first, then smaller total norm. This order decides ties between equally
/// good candidates, so a sample on a first-quadrant window is explained by
/// cones growing up and right rather than by cones anchored at the far
/// corner. A pair where one vector is a positive integer multiple of the
/// other generates the same ray as the shorter one and is skipped.
fn period_pairs(bound: i64) -> Vec<(Vec2, Vec2)> {
    let mut vecs: Vec<Vec2> = (-bound..=bound)
        .flat_map(|x| (-bound..=bound).map(move |y| Vec2::new(x, y)))
        .filter(|v| !v.is_zero())
        .collect();
    let backward = |v: &Vec2| (v.x < 0 || v.y < 0) as u8;
    vecs.sort_by_key(|v| (backward(v), v.norm_l1(), v.norm_inf(), v.x, v.y));
    let mut pairs = vec![(Vec2::ZERO, Vec2::ZERO)];
    pairs.extend(vecs.iter().map(|&v| (Vec2::ZERO, v)));
    let mut rest = Vec::new();
    for (i, &u) in vecs.iter().enumerate() {
        for &v in &vecs[i + 1..] {
            if u.cross(v) == 0 && u.dot(v) > 0 {
                let (a, b) = (gcd(u.x, u.y), gcd(v.x, v.y));
                if a % b == 0 || b % a == 0 {
                    continue;
                }
            }
            rest.push((u, v));
        }
    }
    rest.sort_by_key(|(u, v)| (backward(u) + backward(v), u.norm_l1() + v.norm_l1()));
    pairs.extend(rest);
    pairs
}

const UNKNOWN: u8 = 0;
const VALID: u8 = 1;
const INVALID: u8 = 2;

/// The window padded by `2B`: any point of a cone that lies in the window
/// is reachable from the base by `+u`/`+v` steps that never leave the
/// padding, so validity and cone generation can stay on this grid.
struct Grid {
    pad: Window,
    w: Window,
    cols: Vec<i32>,
    rows: Vec<i32>,
    /// Sample membership; cells of the padding outside the window are
    /// unconstrained.
    state: Vec<Cell>,
    mark: Vec<u32>,
    memo: Vec<u8>,
    stamp: u32,
    queue: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cell {
    Sample,
    Bad,
    Free,
}

impl Grid {
    fn new(w: &Window, margin: i64, sample: &BTreeSet<Vec2>) -> Self {
        let pad = w.padded(margin);
        let n = pad.point_count() as usize;
        let (mut cols, mut rows) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let mut state = Vec::with_capacity(n);
        for p in pad.points() {
            cols.push((p.x - pad.x_min) as i32);
            rows.push((p.y - pad.y_min) as i32);
            state.push(if !w.contains(p) {
                Cell::Free
            } else if sample.contains(&p) {
                Cell::Sample
            } else {
                Cell::Bad
            });
        }
        Grid {
            pad,
            w: *w,
            cols,
            rows,
            state,
            mark: vec![0; n],
            memo: vec![UNKNOWN; n],
            stamp: 0,
            queue: Vec::new(),
        }
    }

    fn step(&self, cell: usize, d: Vec2) -> Option<usize> {
        let x = self.cols[cell] as i64 + d.x;
        let y = self.rows[cell] as i64 + d.y;
        let (pw, ph) = (self.pad.width(), self.pad.height());
        (x >= 0 && y >= 0 && x < pw && y < ph).then(|| (y * pw + x) as usize)
    }

    fn point(&self, cell: usize) -> Vec2 {
        Vec2::new(
            self.cols[cell] as i64 + self.pad.x_min,
            self.rows[cell] as i64 + self.pad.y_min,
        )
    }

    fn window_index(&self, cell: usize) -> Option<usize> {
        let x = self.cols[cell] as i64 + self.pad.x_min;
        let y = self.rows[cell] as i64 + self.pad.y_min;
        let p = Vec2::new(x, y);
        self.w.contains(p).then(|| self.w.index_of(p))
    }

    fn next_stamp(&mut self) -> u32 {
        self.stamp += 1;
        self.stamp
    }

    /// Start a validity pass for `(u, v)`.
    fn reset_validity(&mut self, bad: &[usize], u: Vec2, v: Vec2) {
        self.memo.fill(UNKNOWN);
        if u.cross(v) == 0 && u.dot(v) < 0 {
            // opposite periods walk a line both ways, so the recursion below
            // would meet cycles: mark the invalid cells by a backward sweep
            for c in self.memo.iter_mut() {
                *c = VALID;
            }
            self.queue.clear();
            for &c in bad {
                self.memo[c] = INVALID;
                self.queue.push(c);
            }
            let mut head = 0;
            while head < self.queue.len() {
                let c = self.queue[head];
                head += 1;
                for d in [u, v] {
                    if let Some(n) = self.step(c, -d) {
                        if self.memo[n] != INVALID {
                            self.memo[n] = INVALID;
                            self.queue.push(n);
                        }
                    }
                }
            }
        }
    }

    /// Whether the cone at `cell` avoids every bad cell. Periods with a
    /// common positive direction make the step graph acyclic.
    fn valid(&mut self, cell: usize, u: Vec2, v: Vec2) -> bool {
        match self.memo[cell] {
            VALID => return true,
            INVALID => return false,
            _ => {}
        }
        let ok = self.state[cell] != Cell::Bad
            && [u, v].into_iter().all(|d| {
                d.is_zero() || self.step(cell, d).map_or(true, |n| self.valid(n, u, v))
            });
        self.memo[cell] = if ok { VALID } else { INVALID };
        ok
    }

    /// Visit every window cell of the cone at `base`, as window indices.
    fn cone(&mut self, base: usize, u: Vec2, v: Vec2, mut visit: impl FnMut(usize)) {
        let s = self.next_stamp();
        self.queue.clear();
        self.queue.push(base);
        self.mark[base] = s;
        let mut head = 0;
        while head < self.queue.len() {
            let c = self.queue[head];
            head += 1;
            if let Some(i) = self.window_index(c) {
                visit(i);
            }
            for d in [u, v] {
                if d.is_zero() {
                    continue;
                }
                if let Some(n) = self.step(c, d) {
                    if self.mark[n] != s {
                        self.mark[n] = s;
                        self.queue.push(n);
                    }
                }
            }
        }
    }
}

/// Integers `m ≥ 0` with `lo ≤ c + m·d ≤ hi`, as an inclusive range.
fn step_range(c: i64, d: i64, lo: i64, hi: i64) -> (i64, i64) {
    let (m_lo, m_hi) = match d.signum() {
        0 if (lo..=hi).contains(&c) => (0, i64::MAX),
        0 => (1, 0),
        1 => (-(c - lo).div_euclid(d), (hi - c).div_euclid(d)),
        _ => (-(hi - c).div_euclid(-d), (c - lo).div_euclid(-d)),
    };
    (m_lo.max(0), m_hi)
}

/// `|{b + m·v : m ≥ 0} ∩ w|` for `v ≠ 0`.
fn ray_size(w: &Window, b: Vec2, v: Vec2) -> u64 {
    let (x_lo, x_hi) = step_range(b.x, v.x, w.x_min, w.x_max);
    let (y_lo, y_hi) = step_range(b.y, v.y, w.y_min, w.y_max);
    let (lo, hi) = (x_lo.max(y_lo), x_hi.min(y_hi));
    if hi < lo {
        0
    } else {
        (hi - lo + 1) as u64
    }
}

/// `|cone ∩ w|` for independent periods: one ray along `v` per admissible `n`.
fn cone_size_independent(w: &Window, b: Vec2, u: Vec2, v: Vec2) -> u64 {
    let (_, n_hi) = corner_range(w, u.cross(v), |q| (q - b).cross(v));
    (0..=n_hi).map(|n| ray_size(w, b + n * u, v)).sum()
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &x)| x != 0)
            .map(|(i, x)| i * 64 + x.trailing_zeros() as usize)
    }
}

struct Search<'a> {
    grid: Grid,
    pairs: &'a [(Vec2, Vec2)],
    cands: Vec<Candidate>,
    nodes: u64,
    node_cap: u64,
}

impl Search<'_> {
    fn part(&self, c: &Candidate) -> SdpSet {
        let (u, v) = self.pairs[c.pair as usize];
        SdpSet::new(self.grid.pad.point_at(c.base as usize), u, v)
    }

    fn gain(&mut self, c: Candidate, uncovered: &Bits) -> usize {
        let (u, v) = self.pairs[c.pair as usize];
        let mut n = 0;
        self.grid.cone(c.base as usize, u, v, |i| n += uncovered.get(i) as usize);
        n
    }

    fn cover(&mut self, c: Candidate, uncovered: &mut Bits) -> usize {
        let (u, v) = self.pairs[c.pair as usize];
        let mut n = 0;
        self.grid.cone(c.base as usize, u, v, |i| {
            if uncovered.get(i) {
                uncovered.clear(i);
                n += 1;
            }
        });
        n
    }

    /// Index into `cands` (sorted by size descending) of the best gain.
    fn best(&mut self, uncovered: &Bits) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for k in 0..self.cands.len() {
            let c = self.cands[k];
            if best.is_some_and(|(_, g)| c.size as usize <= g) {
                break;
            }
            let g = self.gain(c, uncovered);
            if g > 0 && best.map_or(true, |(_, bg)| g > bg) {
                best = Some((k, g));
            }
        }
        best
    }

    fn greedy(&mut self, uncovered: &mut Bits, mut left: usize, parts: usize) -> (Vec<usize>, usize) {
        let mut chosen = Vec::new();
        for _ in 0..parts {
            if left == 0 {
                break;
            }
            let Some((k, _)) = self.best(uncovered) else { break };
            left -= self.cover(self.cands[k], uncovered);
            chosen.push(k);
        }
        (chosen, left)
    }

    fn exhaustive(
        &mut self,
        uncovered: &Bits,
        left: usize,
        parts: usize,
        chosen: &mut Vec<usize>,
    ) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::SearchSpaceExceeded { cap: self.node_cap });
        }
        if left == 0 {
            return Ok(true);
        }
        let reach: usize = self.cands.iter().take(parts).map(|c| c.size as usize).sum();
        if parts == 0 || reach < left {
            return Ok(false);
        }
        let pivot = self.grid.w.point_at(uncovered.first().expect("uncovered point"));
        let options: Vec<usize> = (0..self.cands.len())
            .filter(|&k| contains_sdp(&self.part(&self.cands[k]), pivot))
            .collect();
        for k in options {
            let mut rest = Bits(uncovered.0.clone());
            let got = self.cover(self.cands[k], &mut rest);
            chosen.push(k);
            if self.exhaustive(&rest, left - got, parts - 1, chosen)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

/// Search for a union of at most `cfg.max_parts` parts, periods bounded by
/// `cfg.max_coord`, whose points on `w` are exactly `sample`.
pub fn fit_union(sample: &BTreeSet<Vec2>, w: &Window, cfg: &FitConfig) -> Result<FitReport> {
    if let Some(&p) = sample.iter().find(|p| !w.contains(**p)) {
        return Err(Error::SampleOutsideWindow(p));
    }
    let bound = cfg.max_coord.max(0);
    let pairs = period_pairs(bound);
    let mut grid = Grid::new(w, 2 * bound.max(1), sample);
    let n_w = w.point_count() as usize;
    let bad: Vec<usize> = (0..grid.state.len())
        .filter(|&c| grid.state[c] == Cell::Bad)
        .collect();
    let bases: Vec<usize> = (0..grid.state.len())
        .filter(|&c| grid.state[c] == Cell::Sample)
        .collect();

    let mut cands: Vec<Candidate> = Vec::new();
    for (pi, &(u, v)) in pairs.iter().enumerate() {
        grid.reset_validity(&bad, u, v);
        for &b in &bases {
            if !grid.valid(b, u, v) {
                continue;
            }
            let dominated = [u, v].into_iter().any(|d| {
                !d.is_zero()
                    && grid.step(b, -d).is_some_and(|n| {
                        grid.state[n] == Cell::Sample && grid.valid(n, u, v)
                    })
            });
            if dominated {
                continue;
            }
            let size = if u.is_zero() && v.is_zero() {
                1
            } else if u.is_zero() {
                ray_size(w, grid.point(b), v) as u32
            } else if u.cross(v) != 0 {
                cone_size_independent(w, grid.point(b), u, v) as u32
            } else {
                let mut size = 0u32;
                grid.cone(b, u, v, |_| size += 1);
                size
            };
            cands.push(Candidate {
                base: b as u32,
                pair: pi as u32,
                size,
            });
            if cands.len() as u64 > cfg.candidate_cap {
                return Err(Error::SearchSpaceExceeded {
                    cap: cfg.candidate_cap,
                });
            }
        }
    }
    cands.sort_by(|a, b| b.size.cmp(&a.size));

    let mut uncovered = Bits::new(n_w);
    for &p in sample {
        uncovered.set(w.index_of(p));
    }
    let diameter = (w.width().max(w.height()) - 1).max(0);
    let mut report = FitReport {
        outcome: FitOutcome::NoFit,
        window: *w,
        max_parts: cfg.max_parts,
        max_coord: cfg.max_coord,
        effective_base_bound: bound + diameter,
        sample_size: sample.len(),
        period_pairs: pairs.len(),
        candidates: cands.len(),
        largest_candidate: cands.first().map_or(0, |c| c.size as usize),
        greedy_succeeded: false,
        search_nodes: 0,
        nearest_miss: None,
    };

    let mut search = Search {
        grid,
        pairs: &pairs,
        cands,
        nodes: 0,
        node_cap: cfg.node_cap,
    };
    let union_of = |s: &Search<'_>, ks: &[usize]| {
        SdpUnion::new(ks.iter().map(|&k| s.part(&s.cands[k])).collect())
    };

    let mut rest = Bits(uncovered.0.clone());
    let (chosen, left) = search.greedy(&mut rest, sample.len(), cfg.max_parts);
    if left == 0 {
        report.greedy_succeeded = true;
        report.outcome = FitOutcome::Found(union_of(&search, &chosen));
        return Ok(report);
    }
    let witnesses = w
        .points()
        .filter(|&p| rest.get(w.index_of(p)))
        .take(16)
        .collect();
    report.nearest_miss = Some(NearestMiss {
        union: union_of(&search, &chosen),
        uncovered: left,
        witnesses,
    });

    let mut chosen = Vec::new();
    let found = search.exhaustive(&uncovered, sample.len(), cfg.max_parts, &mut chosen);
    report.search_nodes = search.nodes;
    if found? {
        report.outcome = FitOutcome::Found(union_of(&search, &chosen));
    }
    Ok(report)
}

/// Compare a union fitted on `w` with the black set observed on the larger
/// window `w2`.
pub fn predictive_check(
    union: &SdpUnion,
    black: &BTreeSet<Vec2>,
    w: &Window,
    w2: &Window,
) -> Result<Prediction> {
    if !w2.contains_window(w) {
        return Err(Error::WindowNotNested {
            inner: *w,
            outer: *w2,
        });
    }
    let observed: BTreeSet<Vec2> = black.iter().copied().filter(|p| w2.contains(*p)).collect();
    Ok(match first_mismatch(union, &observed, w2) {
        None => Prediction::Confirmed,
        Some(p) => Prediction::Mismatch(p),
    })
}
