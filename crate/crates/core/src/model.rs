//! Tiles, glues, assemblies and the binding rules between them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// A side label. The null glue has no label and strength 0; a labeled glue
/// has strength at least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Glue {
    label: Option<String>,
    strength: u32,
}

impl Glue {
    pub fn null() -> Self {
        Glue {
            label: None,
            strength: 0,
        }
    }

    pub fn new(label: impl Into<String>, strength: u32) -> Result<Self> {
        let label = label.into();
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(Error::InvalidGlue(format!(
                "label `{label}` must be a non-empty token without whitespace"
            )));
        }
        if label == "-" {
            return Err(Error::InvalidGlue("`-` is reserved for the null glue".into()));
        }
        if strength == 0 {
            return Err(Error::InvalidGlue(format!(
                "labeled glue `{label}` needs strength >= 1"
            )));
        }
        Ok(Glue {
            label: Some(label),
            strength,
        })
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn strength(&self) -> u32 {
        self.strength
    }

    pub fn is_null(&self) -> bool {
        self.label.is_none()
    }

    /// Strength contributed when this glue abuts `other`: all or nothing.
    pub fn bond(&self, other: &Glue) -> u32 {
        match (&self.label, &other.label) {
            (Some(a), Some(b)) if a == b && self.strength == other.strength => self.strength,
            _ => 0,
        }
    }
}

impl Default for Glue {
    fn default() -> Self {
        Glue::null()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::East => Direction::West,
            Direction::South => Direction::North,
            Direction::West => Direction::East,
        }
    }

    /// Unit step, y pointing north.
    pub fn offset(self) -> Vec2 {
        match self {
            Direction::North => Vec2::new(0, 1),
            Direction::East => Vec2::new(1, 0),
            Direction::South => Vec2::new(0, -1),
            Direction::West => Vec2::new(-1, 0),
        }
    }

    /// Direction of the unit step `d`, if it is one.
    pub fn from_offset(d: Vec2) -> Option<Direction> {
        Direction::ALL.into_iter().find(|dir| dir.offset() == d)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::East => "east",
            Direction::South => "south",
            Direction::West => "west",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileType {
    pub name: String,
    sides: [Glue; 4],
    pub black: bool,
}

impl TileType {
    /// Sides in N, E, S, W order.
    pub fn new(name: impl Into<String>, sides: [Glue; 4], black: bool) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSystem(format!(
                "tile name `{name}` must be a non-empty token without whitespace"
            )));
        }
        Ok(TileType { name, sides, black })
    }

    pub fn glue(&self, d: Direction) -> &Glue {
        &self.sides[d.index()]
    }

    pub fn sides(&self) -> &[Glue; 4] {
        &self.sides
    }
}

/// Index of a tile type inside its [`TileSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TileId(pub u32);

impl TileId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Strength with which `a` and `b` bind when `b` sits one step from `a` in
/// direction `d`.
pub fn interaction_strength(a: &TileType, b: &TileType, d: Direction) -> u32 {
    a.glue(d).bond(b.glue(d.opposite()))
}

/// Tile types with unique names, addressed by [`TileId`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TileSet {
    tiles: Vec<TileType>,
    by_name: HashMap<String, TileId>,
    // bonds[a][d] lists (b, strength) for every b bonding to a across side d.
    bonds: Vec<[Vec<(TileId, u32)>; 4]>,
    name_rank: Vec<u32>,
}

impl TileSet {
    pub fn new(tiles: Vec<TileType>) -> Result<Self> {
        let mut by_name = HashMap::new();
        for (i, t) in tiles.iter().enumerate() {
            if by_name.insert(t.name.clone(), TileId(i as u32)).is_some() {
                return Err(Error::DuplicateTile(t.name.clone()));
            }
        }
        let mut bonds = Vec::with_capacity(tiles.len());
        for a in &tiles {
            let mut per_dir: [Vec<(TileId, u32)>; 4] = Default::default();
            for d in Direction::ALL {
                for (j, b) in tiles.iter().enumerate() {
                    let s = interaction_strength(a, b, d);
                    if s > 0 {
                        per_dir[d.index()].push((TileId(j as u32), s));
                    }
                }
            }
            bonds.push(per_dir);
        }
        let mut order: Vec<usize> = (0..tiles.len()).collect();
        order.sort_by(|&a, &b| tiles[a].name.cmp(&tiles[b].name));
        let mut name_rank = vec![0; tiles.len()];
        for (rank, &i) in order.iter().enumerate() {
            name_rank[i] = rank as u32;
        }
        Ok(TileSet {
            tiles,
            by_name,
            bonds,
            name_rank,
        })
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn get(&self, id: TileId) -> Option<&TileType> {
        self.tiles.get(id.index())
    }

    /// Panics on a foreign id; use [`TileSet::get`] for untrusted ids.
    pub fn tile(&self, id: TileId) -> &TileType {
        &self.tiles[id.index()]
    }

    pub fn id(&self, name: &str) -> Option<TileId> {
        self.by_name.get(name).copied()
    }

    pub fn contains(&self, id: TileId) -> bool {
        id.index() < self.tiles.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = TileId> {
        (0..self.tiles.len() as u32).map(TileId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TileId, &TileType)> {
        self.tiles
            .iter()
            .enumerate()
            .map(|(i, t)| (TileId(i as u32), t))
    }

    /// Rank of the tile's name in lexicographic order.
    pub fn name_rank(&self, id: TileId) -> u32 {
        self.name_rank[id.index()]
    }

    /// Tile types that bind to `a` when placed one step away in direction `d`.
    pub fn partners(&self, a: TileId, d: Direction) -> &[(TileId, u32)] {
        &self.bonds[a.index()][d.index()]
    }

    pub fn strength(&self, a: TileId, b: TileId, d: Direction) -> u32 {
        interaction_strength(self.tile(a), self.tile(b), d)
    }
}

/// A placed tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub pos: Vec2,
    pub tile: TileId,
}

impl Placement {
    pub fn new(pos: Vec2, tile: TileId) -> Self {
        Placement { pos, tile }
    }
}

/// Finite partial map from lattice points to tile types.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assembly {
    cells: BTreeMap<Vec2, TileId>,
}

impl Assembly {
    pub fn new() -> Self {
        Self::default()
    }

    /// Later placements at a repeated position are rejected.
    pub fn from_placements(placements: impl IntoIterator<Item = Placement>) -> Result<Self> {
        let mut a = Assembly::new();
        for pl in placements {
            a.insert(pl.pos, pl.tile)?;
        }
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, p: Vec2) -> Option<TileId> {
        self.cells.get(&p).copied()
    }

    pub fn is_occupied(&self, p: Vec2) -> bool {
        self.cells.contains_key(&p)
    }

    pub(crate) fn insert(&mut self, p: Vec2, t: TileId) -> Result<()> {
        if self.cells.contains_key(&p) {
            return Err(Error::OccupiedPosition(p));
        }
        self.cells.insert(p, t);
        Ok(())
    }

    /// Placements sorted by position; this is the canonical form.
    pub fn placements(&self) -> impl Iterator<Item = Placement> + '_ {
        self.cells.iter().map(|(&pos, &tile)| Placement { pos, tile })
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.cells.keys().copied()
    }

    /// Sum of bond strengths `t` would receive at the unoccupied position `p`.
    pub fn attach_strength(&self, tiles: &TileSet, p: Vec2, t: &TileType) -> Result<u32> {
        if self.is_occupied(p) {
            return Err(Error::OccupiedPosition(p));
        }
        Ok(Direction::ALL
            .into_iter()
            .filter_map(|d| {
                self.get(p + d.offset())
                    .map(|q| interaction_strength(t, tiles.tile(q), d))
            })
            .sum())
    }

    /// Connected under 4-adjacency, ignoring glues.
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.positions().next() else {
            return true;
        };
        let mut seen = std::collections::HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for d in Direction::ALL {
                let q = p + d.offset();
                if self.is_occupied(q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen.len() == self.len()
    }
}

impl FromIterator<Placement> for Assembly {
    /// Duplicate positions keep the last placement.
    fn from_iter<I: IntoIterator<Item = Placement>>(iter: I) -> Self {
        Assembly {
            cells: iter.into_iter().map(|p| (p.pos, p.tile)).collect(),
        }
    }
}

/// Whether every cut of the binding graph of `asm` has strength at least `tau`.
///
/// Temperature 1 reduces to connectivity of the bond graph; higher
/// temperatures run a Stoer–Wagner global minimum cut.
pub fn is_tau_stable(tiles: &TileSet, asm: &Assembly, tau: u32) -> bool {
    let n = asm.len();
    if n <= 1 || tau == 0 {
        return true;
    }
    let (nodes, edges) = bond_graph(tiles, asm);
    if tau == 1 {
        let mut adj = vec![Vec::new(); nodes.len()];
        for &(a, b, _) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for &b in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        return count == n;
    }
    min_cut(n, &edges) >= u64::from(tau)
}

/// Nodes in canonical order and weighted bond edges between their indices.
pub(crate) fn bond_graph(tiles: &TileSet, asm: &Assembly) -> (Vec<Vec2>, Vec<(usize, usize, u32)>) {
    let nodes: Vec<Vec2> = asm.positions().collect();
    let index: HashMap<Vec2, usize> = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut edges = Vec::new();
    for (i, &p) in nodes.iter().enumerate() {
        let a = asm.get(p).unwrap();
        for d in [Direction::East, Direction::North] {
            let q = p + d.offset();
            if let Some(&j) = index.get(&q) {
                let s = tiles.strength(a, asm.get(q).unwrap(), d);
                if s > 0 {
                    edges.push((i, j, s));
                }
            }
        }
    }
    (nodes, edges)
}

/// Stoer–Wagner global minimum cut weight of an undirected graph.
fn min_cut(n: usize, edges: &[(usize, usize, u32)]) -> u64 {
    let mut w = vec![vec![0u64; n]; n];
    for &(a, b, s) in edges {
        w[a][b] += u64::from(s);
        w[b][a] += u64::from(s);
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while active.len() > 1 {
        let mut key = vec![0u64; n];
        let mut added = vec![false; n];
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let next = *active
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| (key[v], std::cmp::Reverse(v)))
                .unwrap();
            added[next] = true;
            if step == active.len() - 1 {
                best = best.min(key[next]);
                prev = last;
                last = next;
                break;
            }
            prev = last;
            last = next;
            for &v in &active {
                if !added[v] {
                    key[v] += w[next][v];
                }
            }
        }
        // merge `last` into `prev`
        for &v in &active {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        active.retain(|&v| v != last);
    }
    best
}

/// Tile set, seed assembly and temperature.
#[derive(Clone, Debug)]
pub struct TileAssemblySystem {
    tiles: TileSet,
    seed: Assembly,
    temperature: u32,
}

impl TileAssemblySystem {
    /// The seed must be nonempty, connected and stable at `temperature`.
    pub fn new(tiles: TileSet, seed: Assembly, temperature: u32) -> Result<Self> {
        if temperature == 0 {
            return Err(Error::InvalidSystem("temperature must be at least 1".into()));
        }
        if seed.is_empty() {
            return Err(Error::InvalidSystem("seed assembly is empty".into()));
        }
        if let Some(pl) = seed.placements().find(|pl| !tiles.contains(pl.tile)) {
            return Err(Error::UnknownTileType(format!("#{}", pl.tile.0)));
        }
        if !seed.is_connected() {
            return Err(Error::InvalidSystem("seed assembly is not connected".into()));
        }
        if !is_tau_stable(&tiles, &seed, temperature) {
            return Err(Error::InvalidSystem(format!(
                "seed assembly is not stable at temperature {temperature}"
            )));
        }
        Ok(TileAssemblySystem {
            tiles,
            seed,
            temperature,
        })
    }

    pub fn tiles(&self) -> &TileSet {
        &self.tiles
    }

    pub fn seed(&self) -> &Assembly {
        &self.seed
    }

    pub fn temperature(&self) -> u32 {
        self.temperature
    }

    pub fn can_attach(&self, asm: &Assembly, p: Vec2, t: TileId) -> Result<bool> {
        let tile = self
            .tiles
            .get(t)
            .ok_or_else(|| Error::UnknownTileType(format!("#{}", t.0)))?;
        if asm.is_occupied(p) {
            return Ok(false);
        }
        Ok(asm.attach_strength(&self.tiles, p, tile)? >= self.temperature)
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
