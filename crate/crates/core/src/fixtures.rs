//! Bundled tile assembly systems. Every seed is a single tile at the origin.

use crate::geom::Vec2;
use crate::model::{Assembly, Glue, Placement, TileAssemblySystem, TileSet, TileType};

type Side<'a> = Option<(&'a str, u32)>;

fn tile(name: &str, black: bool, [n, e, s, w]: [Side<'_>; 4]) -> TileType {
    let glue = |side: Side<'_>| match side {
        Some((label, strength)) => Glue::new(label, strength).expect("fixture glue"),
        None => Glue::null(),
    };
    TileType::new(name, [glue(n), glue(e), glue(s), glue(w)], black).expect("fixture tile")
}

fn system(tiles: Vec<TileType>, seed: &str, temperature: u32) -> TileAssemblySystem {
    let tiles = TileSet::new(tiles).expect("fixture tile set");
    let id = tiles.id(seed).expect("fixture seed tile");
    let seed = Assembly::from_iter([Placement::new(Vec2::ZERO, id)]);
    TileAssemblySystem::new(tiles, seed, temperature).expect("fixture system")
}

/// Temperature 1: a white seed followed by an endless eastward row of one
/// black tile type.
pub fn row() -> TileAssemblySystem {
    system(
        vec![
            tile("seed", false, [None, Some(("r", 1)), None, None]),
            tile("row", true, [None, Some(("r", 1)), None, Some(("r", 1))]),
        ],
        "seed",
        1,
    )
}

/// Temperature 1: an eastward row alternating two white tile types, the
/// first of which sprouts an endless black column at every odd `x`.
pub fn comb() -> TileAssemblySystem {
    system(
        vec![
            tile("seed", false, [None, Some(("a", 1)), None, None]),
            tile("tooth", false, [Some(("c", 1)), Some(("b", 1)), None, Some(("a", 1))]),
            tile("gap", false, [None, Some(("a", 1)), None, Some(("b", 1))]),
            tile("shaft", true, [Some(("c", 1)), None, Some(("c", 1)), None]),
        ],
        "seed",
        1,
    )
}

/// Temperature 1: an east arm with period 3 (black at `x ≡ 1`) and a north
/// arm with period 2 (black at even `y ≥ 2`).
pub fn two_arm() -> TileAssemblySystem {
    system(
        vec![
            tile("seed", false, [Some(("n0", 1)), Some(("e0", 1)), None, None]),
            tile("e0", true, [None, Some(("e1", 1)), None, Some(("e0", 1))]),
            tile("e1", false, [None, Some(("e2", 1)), None, Some(("e1", 1))]),
            tile("e2", false, [None, Some(("e0", 1)), None, Some(("e2", 1))]),
            tile("n0", false, [Some(("n1", 1)), None, Some(("n0", 1)), None]),
            tile("n1", true, [Some(("n0", 1)), None, Some(("n1", 1)), None]),
        ],
        "seed",
        1,
    )
}

/// Temperature 2 XOR system painting the discrete Sierpinski triangle on the
/// first quadrant. Both axes carry 1s; interior tile `r<w><s>` reads its west
/// and south inputs and emits their XOR north and east.
pub fn sierpinski() -> TileAssemblySystem {
    let mut tiles = vec![
        tile("seed", true, [Some(("c", 2)), Some(("r", 2)), None, None]),
        tile("row", true, [Some(("1", 1)), Some(("r", 2)), None, Some(("r", 2))]),
        tile("col", true, [Some(("c", 2)), Some(("1", 1)), Some(("c", 2)), None]),
    ];
    for w in 0..2u8 {
        for s in 0..2u8 {
            let out = (w ^ s).to_string();
            let (w_label, s_label) = (w.to_string(), s.to_string());
            tiles.push(tile(
                &format!("r{w}{s}"),
                w ^ s == 1,
                [
                    Some((out.as_str(), 1)),
                    Some((out.as_str(), 1)),
                    Some((s_label.as_str(), 1)),
                    Some((w_label.as_str(), 1)),
                ],
            ));
        }
    }
    system(tiles, "seed", 2)
}

/// Temperature 1: two tile types compete for the seed's east side.
pub fn two_choice() -> TileAssemblySystem {
    system(
        vec![
            tile("seed", false, [None, Some(("g", 1)), None, None]),
            tile("a", true, [None, None, None, Some(("g", 1))]),
            tile("b", false, [None, None, None, Some(("g", 1))]),
        ],
        "seed",
        1,
    )
}

/// Temperature 1 system whose paths run east along a row of repeating
/// `row` tiles, turn north up a three-tile column and then descend a
/// south-west staircase of alternating `stepx`/`stepy` tiles. When the row
/// is long enough the staircase runs into it, so its repetition cannot be
/// pumped; the repeated `row` tiles remain pumpable.
pub fn blocked_spiral() -> TileAssemblySystem {
    system(
        vec![
            tile("seed", false, [None, Some(("s", 1)), None, None]),
            tile("lead", false, [None, Some(("r", 1)), None, Some(("s", 1))]),
            tile("row", false, [Some(("u", 1)), Some(("r", 1)), None, Some(("r", 1))]),
            tile("up1", false, [Some(("t", 1)), None, Some(("u", 1)), None]),
            tile("up2", false, [Some(("v", 1)), None, Some(("t", 1)), None]),
            tile("turn", false, [None, None, Some(("v", 1)), Some(("w", 1))]),
            tile("stepx", true, [None, Some(("w", 1)), Some(("z", 1)), None]),
            tile("stepy", true, [Some(("z", 1)), None, None, Some(("w", 1))]),
        ],
        "seed",
        1,
    )
}

/// The directed fixtures.
pub fn directed() -> Vec<TileAssemblySystem> {
    vec![row(), comb(), two_arm(), sierpinski()]
}
