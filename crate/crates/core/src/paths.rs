//! Seed-rooted tile paths at temperature 1, repeated tile types along them,
//! and whether the segment between two repeats can be pumped forever.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::model::{Placement, TileAssemblySystem, TileSet};

/// A simple path of pairwise-bound placements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TilePath {
    steps: Vec<Placement>,
}

impl TilePath {
    /// Checks simplicity, adjacency and a bond between consecutive tiles.
    pub fn new(tiles: &TileSet, steps: Vec<Placement>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (k, pl) in steps.iter().enumerate() {
            if !tiles.contains(pl.tile) {
                return Err(Error::UnknownTileType(pl.tile.to_string()));
            }
            if !seen.insert(pl.pos) {
                return Err(Error::InvalidSystem(format!(
                    "path revisits {} at step {k}",
                    pl.pos
                )));
            }
            if k > 0 {
                let prev = steps[k - 1];
                let Some(d) = crate::model::Direction::from_offset(pl.pos - prev.pos) else {
                    return Err(Error::InvalidSystem(format!(
                        "steps {} and {k} are not adjacent",
                        k - 1
                    )));
                };
                if tiles.strength(prev.tile, pl.tile, d) == 0 {
                    return Err(Error::InvalidSystem(format!(
                        "steps {} and {k} do not bind",
                        k - 1
                    )));
                }
            }
        }
        Ok(TilePath { steps })
    }

    pub fn steps(&self) -> &[Placement] {
        &self.steps
    }

    /// Number of moves, one less than the number of placements.
    pub fn len(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Depth-first enumeration of seed-rooted paths, see [`producible_paths`].
pub struct PathIter<'a> {
    sys: &'a TileAssemblySystem,
    max_len: usize,
    path: Vec<Placement>,
    occupied: HashSet<Vec2>,
    // choices[k] holds the untried placements for path[k], in reverse.
    choices: Vec<Vec<Placement>>,
}

/// Every simple path of at most `max_len` moves that starts at a seed
/// placement, where each new tile binds to the previous one and avoids the
/// seed and the path so far.
pub fn producible_paths(sys: &TileAssemblySystem, max_len: usize) -> Result<PathIter<'_>> {
    if sys.temperature() != 1 {
        return Err(Error::WrongTemperature(sys.temperature()));
    }
    let mut roots: Vec<Placement> = sys.seed().placements().collect();
    roots.reverse();
    Ok(PathIter {
        sys,
        max_len,
        path: Vec::new(),
        occupied: sys.seed().positions().collect(),
        choices: vec![roots],
    })
}

impl PathIter<'_> {
    fn extensions(&self) -> Vec<Placement> {
        let head = *self.path.last().unwrap();
        let tiles = self.sys.tiles();
        let mut out = Vec::new();
        for d in crate::model::Direction::ALL {
            let p = head.pos + d.offset();
            if self.occupied.contains(&p) {
                continue;
            }
            for &(t, _) in tiles.partners(head.tile, d) {
                out.push(Placement::new(p, t));
            }
        }
        out.reverse();
        out
    }
}

impl Iterator for PathIter<'_> {
    type Item = TilePath;

    fn next(&mut self) -> Option<TilePath> {
        loop {
            let level = self.choices.len().checked_sub(1)?;
            let Some(pl) = self.choices[level].pop() else {
                self.choices.pop();
                continue;
            };
            while self.path.len() > level {
                let gone = self.path.pop().unwrap();
                if !self.path.is_empty() {
                    self.occupied.remove(&gone.pos);
                }
            }
            if level > 0 {
                self.occupied.insert(pl.pos);
            }
            self.path.push(pl);
            let next = if self.path.len() <= self.max_len {
                self.extensions()
            } else {
                Vec::new()
            };
            self.choices.push(next);
            return Some(TilePath {
                steps: self.path.clone(),
            });
        }
    }
}

/// Index pairs `i < j` with equal tile types, ordered by `(j - i, i)`.
pub fn repetitions(path: &TilePath) -> Vec<(usize, usize)> {
    let s = &path.steps;
    let mut out = Vec::new();
    for gap in 1..s.len() {
        for i in 0..s.len() - gap {
            if s[i].tile == s[i + gap].tile {
                out.push((i, i + gap));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PumpVerdict {
    Pumpable,
    /// The first copy (1-based, copy `c` is shifted by `c·d`) that lands on
    /// an already laid position, and the first such position in that copy.
    Blocked { copy_index: usize, collision_pos: Vec2 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pumped {
    Path(Vec<Placement>),
    Blocked { copy_index: usize, collision_pos: Vec2 },
}

fn check_repetition(path: &TilePath, i: usize, j: usize) -> Result<Vec2> {
    let s = &path.steps;
    if i >= j || j >= s.len() || s[i].tile != s[j].tile {
        return Err(Error::InvalidRepetition { i, j });
    }
    Ok(s[j].pos - s[i].pos)
}

/// `path[0..j)` followed by `k` copies of `path[i..j)` shifted by
/// `d, 2d, …, kd` (where `d = p_j - p_i`) and closed by the repeated tile at
/// `p_j + k·d`. With `k = 0` this is the path up to and including `j`.
pub fn pump_k(path: &TilePath, i: usize, j: usize, k: usize) -> Result<Pumped> {
    let d = check_repetition(path, i, j)?;
    let s = &path.steps;
    let mut laid: HashSet<Vec2> = s[..j].iter().map(|pl| pl.pos).collect();
    let mut out: Vec<Placement> = s[..j].to_vec();
    for c in 1..=k {
        let shift = c as i64 * d;
        for pl in &s[i..j] {
            let q = pl.pos + shift;
            if !laid.insert(q) {
                return Ok(Pumped::Blocked {
                    copy_index: c,
                    collision_pos: q,
                });
            }
            out.push(Placement::new(q, pl.tile));
        }
    }
    let end = s[j].pos + k as i64 * d;
    if !laid.insert(end) {
        return Ok(Pumped::Blocked {
            copy_index: k + 1,
            collision_pos: end,
        });
    }
    out.push(Placement::new(end, s[j].tile));
    Ok(Pumped::Path(out))
}

fn diameter(points: impl Iterator<Item = Vec2> + Clone) -> i64 {
    let xs = points.clone().map(|p| p.x);
    let ys = points.map(|p| p.y);
    let span = |it: &mut dyn Iterator<Item = i64>| {
        let (lo, hi) = it.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo > hi {
            0
        } else {
            hi - lo
        }
    };
    span(&mut xs.into_iter()).max(span(&mut ys.into_iter()))
}

/// Number of copies that [`is_pumpable`] inspects: `⌈(D + diam)/|d|⌉ + 1`
/// with `D` the segment diameter and `diam` that of `path[0..j)`, all in the
/// max norm.
pub fn pump_bound(path: &TilePath, i: usize, j: usize) -> Result<usize> {
    let d = check_repetition(path, i, j)?;
    let s = &path.steps;
    let seg = diameter(s[i..j].iter().map(|pl| pl.pos));
    let pre = diameter(s[..j].iter().map(|pl| pl.pos));
    let step = d.norm_inf();
    Ok(((seg + pre + step - 1) / step) as usize + 1)
}

/// Whether the segment `path[i..j)` can be repeated forever along
/// `d = p_j - p_i` without landing on a laid position.
///
/// Copies `c < c'` overlap exactly when copy `c' - c` overlaps copy 0, which
/// lies in `path[0..j)`, so it suffices to test each copy against that
/// prefix. A copy can only reach the prefix while `c·|d| ≤ diam(path[0..j))`,
/// hence the finite bound of [`pump_bound`].
pub fn is_pumpable(path: &TilePath, i: usize, j: usize) -> Result<PumpVerdict> {
    let d = check_repetition(path, i, j)?;
    let bound = pump_bound(path, i, j)?;
    let s = &path.steps;
    let prefix: HashSet<Vec2> = s[..j].iter().map(|pl| pl.pos).collect();
    for c in 1..=bound {
        let shift = c as i64 * d;
        if let Some(q) = s[i..j]
            .iter()
            .map(|pl| pl.pos + shift)
            .find(|q| prefix.contains(q))
        {
            return Ok(PumpVerdict::Blocked {
                copy_index: c,
                collision_pos: q,
            });
        }
    }
    Ok(PumpVerdict::Pumpable)
}

/// First repetition (in [`repetitions`] order) that is pumpable.
pub fn find_pumpable(path: &TilePath) -> Option<(usize, usize)> {
    repetitions(path)
        .into_iter()
        .find(|&(i, j)| matches!(is_pumpable(path, i, j), Ok(PumpVerdict::Pumpable)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedExample {
    pub path: TilePath,
    pub i: usize,
    pub j: usize,
    pub copy_index: usize,
    pub collision_pos: Vec2,
}

/// Outcome of running [`find_pumpable`] over every seed-rooted path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PumpScanReport {
    pub max_len_scanned: usize,
    pub paths_scanned: usize,
    pub tile_types: usize,
    /// Least `L` such that every scanned path with at least `L` moves holds
    /// a pumpable repetition.
    pub c_estimate: usize,
    /// Paths with more placements than tile types but no pumpable repetition.
    pub violations: Vec<TilePath>,
    /// Blocked repetitions, each reported on the shortest path that ends in
    /// its second occurrence.
    pub blocked_examples: Vec<BlockedExample>,
    pub longest_path: usize,
    /// Some scanned path had more placements than there are tile types.
    pub reached_pigeonhole: bool,
}

pub fn pumpability_scan(sys: &TileAssemblySystem, max_len: usize) -> Result<PumpScanReport> {
    let tile_types = sys.tiles().len();
    let mut report = PumpScanReport {
        max_len_scanned: max_len,
        paths_scanned: 0,
        tile_types,
        c_estimate: 0,
        violations: Vec::new(),
        blocked_examples: Vec::new(),
        longest_path: 0,
        reached_pigeonhole: false,
    };
    for path in producible_paths(sys, max_len)? {
        report.paths_scanned += 1;
        report.longest_path = report.longest_path.max(path.len());
        let placements = path.steps().len();
        report.reached_pigeonhole |= placements > tile_types;
        let head = placements - 1;
        for (i, j) in repetitions(&path).into_iter().filter(|&(_, j)| j == head) {
            if let PumpVerdict::Blocked {
                copy_index,
                collision_pos,
            } = is_pumpable(&path, i, j)?
            {
                report.blocked_examples.push(BlockedExample {
                    path: path.clone(),
                    i,
                    j,
                    copy_index,
                    collision_pos,
                });
            }
        }
        if find_pumpable(&path).is_none() {
            report.c_estimate = report.c_estimate.max(path.len() + 1);
            if placements > tile_types {
                report.violations.push(path);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::attach;
    use crate::fixtures;
    use crate::model::{Assembly, Glue, TileId, TileType};
    use proptest::prelude::*;

    fn straight(n: usize) -> (TileSet, TilePath) {
        let ts = TileSet::new(vec![TileType::new(
            "a",
            [Glue::null(), Glue::new("g", 1).unwrap(), Glue::null(), Glue::new("g", 1).unwrap()],
            false,
        )
        .unwrap()])
        .unwrap();
        let steps = (0..n as i64)
            .map(|x| Placement::new(Vec2::new(x, 0), TileId(0)))
            .collect();
        let path = TilePath::new(&ts, steps).unwrap();
        (ts, path)
    }

    /// A free-form path over a single wildcard tile type: every side carries
    /// the same glue so any simple lattice walk is a valid path.
    fn walk(points: &[(i64, i64)], types: &[u32]) -> TilePath {
        let ts = wildcard_tiles(types.iter().copied().max().unwrap_or(0) as usize + 1);
        let steps = points
            .iter()
            .zip(types)
            .map(|(&(x, y), &t)| Placement::new(Vec2::new(x, y), TileId(t)))
            .collect();
        TilePath::new(&ts, steps).unwrap()
    }

    fn wildcard_tiles(n: usize) -> TileSet {
        let g = Glue::new("g", 1).unwrap();
        TileSet::new(
            (0..n)
                .map(|i| TileType::new(format!("w{i}"), [g.clone(), g.clone(), g.clone(), g.clone()], false).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn path_validation() {
        let ts = wildcard_tiles(1);
        let p = |x, y| Placement::new(Vec2::new(x, y), TileId(0));
        assert!(TilePath::new(&ts, vec![p(0, 0), p(1, 0), p(0, 0)]).is_err());
        assert!(TilePath::new(&ts, vec![p(0, 0), p(1, 1)]).is_err());
        let (row_ts, _) = straight(1);
        let bad = vec![
            Placement::new(Vec2::new(0, 0), TileId(0)),
            Placement::new(Vec2::new(0, 1), TileId(0)),
        ];
        assert!(TilePath::new(&row_ts, bad).is_err());
    }

    #[test]
    fn paths_without_glues_are_trivial() {
        let sys = fixtures::two_choice();
        let no_glue = crate::model::TileAssemblySystem::new(
            TileSet::new(vec![TileType::new("s", Default::default(), false).unwrap()]).unwrap(),
            Assembly::from_iter([Placement::new(Vec2::ZERO, TileId(0))]),
            1,
        )
        .unwrap();
        let all: Vec<_> = producible_paths(&no_glue, 5).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].len(), 0);
        // seed plus one of two competing tiles
        assert_eq!(producible_paths(&sys, 5).unwrap().count(), 3);
    }

    #[test]
    fn row_paths_one_per_length() {
        let sys = fixtures::row();
        let lens: Vec<usize> = producible_paths(&sys, 4).unwrap().map(|p| p.len()).collect();
        assert_eq!(lens, vec![0, 1, 2, 3, 4]);
        assert!(matches!(
            producible_paths(&fixtures::sierpinski(), 3),
            Err(Error::WrongTemperature(2))
        ));
    }

    #[test]
    fn paths_replay_through_attach() {
        for sys in [fixtures::blocked_spiral(), fixtures::comb(), fixtures::two_arm()] {
            for path in producible_paths(&sys, 14).unwrap() {
                let mut asm = sys.seed().clone();
                for pl in &path.steps()[1..] {
                    asm = attach(&sys, &asm, pl.pos, pl.tile).unwrap();
                }
            }
        }
    }

    #[test]
    fn repetition_examples() {
        let distinct = walk(&[(0, 0), (1, 0), (2, 0)], &[0, 1, 2]);
        assert!(repetitions(&distinct).is_empty());
        let aba = walk(&[(0, 0), (1, 0), (2, 0)], &[0, 1, 0]);
        assert_eq!(repetitions(&aba), vec![(0, 2)]);
        let (_, row) = straight(4);
        assert_eq!(repetitions(&row), vec![(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)]);
        assert!(matches!(is_pumpable(&aba, 0, 1), Err(Error::InvalidRepetition { .. })));
    }

    #[test]
    fn straight_pump() {
        let (_, path) = straight(2);
        let Pumped::Path(out) = pump_k(&path, 0, 1, 3).unwrap() else {
            panic!("straight line cannot collide");
        };
        let xs: Vec<i64> = out.iter().map(|pl| pl.pos.x).collect();
        assert_eq!(xs, vec![0, 1, 2, 3, 4]);
        assert!(out.iter().all(|pl| pl.pos.y == 0));
        assert_eq!(is_pumpable(&path, 0, 1).unwrap(), PumpVerdict::Pumpable);
        assert_eq!(find_pumpable(&path), Some((0, 1)));
    }

    #[test]
    fn segment_blocked_by_first_copy() {
        let hook = walk(
            &[(1, 4), (0, 4), (0, 3), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0)],
            &[5, 6, 7, 0, 1, 2, 0, 3],
        );
        // d = (2,1) - (0,2) = (2,-1) heads away from the prefix
        assert_eq!(is_pumpable(&hook, 3, 6).unwrap(), PumpVerdict::Pumpable);

        let blocked = walk(
            &[(0, 2), (1, 2), (2, 2), (2, 1), (1, 1), (1, 0), (2, 0)],
            &[4, 5, 6, 0, 1, 2, 0],
        );
        // d = (0,-1): the first copy of [(2,1),(1,1),(1,0)] starts on (2,0)
        // and then hits (1,0).
        let expected = PumpVerdict::Blocked {
            copy_index: 1,
            collision_pos: Vec2::new(1, 0),
        };
        assert_eq!(is_pumpable(&blocked, 3, 6).unwrap(), expected);
        assert_eq!(
            pump_k(&blocked, 3, 6, 1).unwrap(),
            Pumped::Blocked {
                copy_index: 1,
                collision_pos: Vec2::new(1, 0)
            }
        );
    }

    #[test]
    fn second_copy_reenters_prefix() {
        // Prefix runs along y = 0 out to x = 6; the segment starts at (3,3),
        // steps to (2,3), and repeats one step south-west. Copy 1 sits on
        // (2,2),(1,2); copy 2 on (1,1),(0,1); copy 3 reaches (0,0).
        let pts = [
            (0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3), (3, 3), (2, 3), (2, 2),
        ];
        let types = [10, 11, 12, 13, 14, 15, 16, 17, 0, 1, 0];
        let path = walk(&pts, &types);
        let verdict = is_pumpable(&path, 8, 10).unwrap();
        assert_eq!(
            verdict,
            PumpVerdict::Blocked {
                copy_index: 3,
                collision_pos: Vec2::new(0, 0)
            }
        );
        assert!(matches!(pump_k(&path, 8, 10, 1).unwrap(), Pumped::Path(_)));
        // the closing tile of k = 2 is the first tile of copy 3
        for k in [2, 3] {
            assert_eq!(
                pump_k(&path, 8, 10, k).unwrap(),
                Pumped::Blocked {
                    copy_index: 3,
                    collision_pos: Vec2::new(0, 0)
                }
            );
        }
    }

    #[test]
    fn u_turn_hook_is_blocked() {
        // east two steps, north, then west back over the start: the segment
        // between the two `0` tiles points back across the prefix.
        let path = walk(
            &[(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1)],
            &[3, 0, 4, 5, 6, 0],
        );
        // d = (0,1) - (1,0) = (-1, 1); copy 1 of [(1,0),(2,0),(2,1),(1,1)]
        // starts at (0,1), which the prefix does not hold, then (1,1) which it does.
        let verdict = is_pumpable(&path, 1, 5).unwrap();
        assert_eq!(
            verdict,
            PumpVerdict::Blocked {
                copy_index: 1,
                collision_pos: Vec2::new(1, 1)
            }
        );
        assert_eq!(find_pumpable(&path), None);
    }

    #[test]
    fn spiral_fixture_has_blocked_and_pumpable_repeats() {
        let sys = fixtures::blocked_spiral();
        let paths: Vec<TilePath> = producible_paths(&sys, 40).unwrap().collect();
        let names = |p: &TilePath| -> Vec<String> {
            p.steps()
                .iter()
                .map(|pl| sys.tiles().tile(pl.tile).name.clone())
                .collect()
        };
        // The row of length x = 5 then the climb and the staircase, which is
        // stopped by the row after two full steps.
        let target = paths
            .iter()
            .filter(|p| {
                let n = names(p);
                n.iter().filter(|s| *s == "row").count() == 4 && n.last().unwrap() == "stepx"
            })
            .max_by_key(|p| p.len())
            .unwrap();
        let ts = sys.tiles();
        let first_stepx = target
            .steps()
            .iter()
            .position(|pl| ts.tile(pl.tile).name == "stepx")
            .unwrap();
        let verdict = is_pumpable(target, first_stepx, first_stepx + 2).unwrap();
        assert!(matches!(verdict, PumpVerdict::Blocked { .. }), "{verdict:?}");
        let (i, j) = find_pumpable(target).unwrap();
        assert!(j < first_stepx);
        assert_eq!(ts.tile(target.steps()[i].tile).name, "row");
    }

    #[test]
    fn scan_examples() {
        let row = pumpability_scan(&fixtures::row(), 10).unwrap();
        assert_eq!(row.c_estimate, 2);
        assert!(row.violations.is_empty());
        assert_eq!(row.paths_scanned, 11);

        let spiral = pumpability_scan(&fixtures::blocked_spiral(), 40).unwrap();
        assert!(!spiral.blocked_examples.is_empty());
        assert!(spiral.violations.is_empty());

        // all glues distinct: nothing binds, no path reaches pigeonhole length
        let lonely = pumpability_scan(&fixtures::two_choice(), 10).unwrap();
        assert!(!lonely.reached_pigeonhole);
        assert_eq!(lonely.longest_path, 1);
        assert!(lonely.violations.is_empty());

        assert!(matches!(
            pumpability_scan(&fixtures::sierpinski(), 4),
            Err(Error::WrongTemperature(2))
        ));
    }

    #[test]
    fn spiral_long_paths_always_have_pumpable_segment() {
        let sys = fixtures::blocked_spiral();
        let report = pumpability_scan(&sys, 30).unwrap();
        for path in producible_paths(&sys, 30).unwrap() {
            if path.len() >= report.c_estimate {
                assert!(find_pumpable(&path).is_some());
            }
        }
    }

    // Independent oracle: the segment collides at copy c exactly when some
    // prefix point minus some segment point is c·d.
    fn arithmetic_verdict(path: &TilePath, i: usize, j: usize) -> PumpVerdict {
        let s = path.steps();
        let d = s[j].pos - s[i].pos;
        let mut best: Option<(usize, usize, Vec2)> = None;
        for (k, seg) in s[i..j].iter().enumerate() {
            for pre in &s[..j] {
                let diff = pre.pos - seg.pos;
                if diff.cross(d) != 0 {
                    continue;
                }
                let c = if d.x != 0 { diff.x / d.x } else { diff.y / d.y };
                if c >= 1 && c * d == diff {
                    let cand = (c as usize, k, pre.pos);
                    if best.map_or(true, |b| (cand.0, cand.1) < (b.0, b.1)) {
                        best = Some(cand);
                    }
                }
            }
        }
        match best {
            None => PumpVerdict::Pumpable,
            Some((c, _, pos)) => PumpVerdict::Blocked {
                copy_index: c,
                collision_pos: pos,
            },
        }
    }

    fn random_walk() -> impl Strategy<Value = TilePath> {
        (proptest::collection::vec(0..4usize, 2..24), proptest::collection::vec(0..3u32, 24))
            .prop_map(|(moves, types)| {
                let mut pos = Vec2::ZERO;
                let mut seen = HashSet::from([pos]);
                let mut pts = vec![(0, 0)];
                for m in moves {
                    let next = pos + crate::model::Direction::ALL[m].offset();
                    if seen.insert(next) {
                        pos = next;
                        pts.push((pos.x, pos.y));
                    }
                }
                let n = pts.len();
                walk(&pts, &types[..n])
            })
    }

    proptest! {
        #[test]
        fn verdict_matches_arithmetic_oracle(path in random_walk()) {
            for (i, j) in repetitions(&path) {
                prop_assert_eq!(is_pumpable(&path, i, j).unwrap(), arithmetic_verdict(&path, i, j));
            }
        }

        #[test]
        fn pumped_paths_stay_valid(path in random_walk(), k in 0usize..6) {
            let ts = wildcard_tiles(3);
            for (i, j) in repetitions(&path) {
                if let Pumped::Path(steps) = pump_k(&path, i, j, k).unwrap() {
                    prop_assert_eq!(steps.len(), j + 1 + k * (j - i));
                    prop_assert!(TilePath::new(&ts, steps).is_ok());
                }
            }
        }
    }
}
