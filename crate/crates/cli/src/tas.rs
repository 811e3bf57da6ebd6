//! Line-oriented tile assembly system files.
//!
//! ```text
//! temperature 1
//! tile row black
//!   north - 0
//!   east  r 1
//!   south - 0
//!   west  r 1
//! end
//! seed 0 0 row
//! ```
//!
//! `#` starts a comment. `-` is the null glue and must have strength 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use tamlab_core::{
    Assembly, Direction, Glue, Placement, TileAssemblySystem, TileSet, TileType, Vec2,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedPlacement {
    pub pos: Vec2,
    pub tile: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TasDocument {
    pub temperature: u32,
    pub tiles: Vec<TileType>,
    pub seed: Vec<SeedPlacement>,
}

const SIDES: [(&str, Direction); 4] = [
    ("north", Direction::North),
    ("east", Direction::East),
    ("south", Direction::South),
    ("west", Direction::West),
];

struct PendingTile {
    line: usize,
    name: String,
    black: bool,
    sides: [Option<Glue>; 4],
}

fn parse_int<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .or_else(|_| err(line, format!("{what} `{tok}` is not a valid integer")))
}

fn parse_glue(line: usize, label: &str, strength: &str) -> Result<Glue, ParseError> {
    let strength: u32 = strength.parse().or_else(|_| {
        err(
            line,
            format!("strength `{strength}` must be a nonnegative integer"),
        )
    })?;
    if label == "-" {
        if strength != 0 {
            return err(line, format!("null glue `-` must have strength 0, got {strength}"));
        }
        return Ok(Glue::null());
    }
    if strength == 0 {
        return err(line, format!("glue `{label}` needs a positive strength"));
    }
    Glue::new(label, strength).or_else(|e| err(line, e.to_string()))
}

pub fn parse_tas(text: &str) -> Result<TasDocument, ParseError> {
    let mut temperature: Option<u32> = None;
    let mut tiles: Vec<TileType> = Vec::new();
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    let mut seeds: Vec<(usize, SeedPlacement)> = Vec::new();
    let mut open: Option<PendingTile> = None;
    let mut last = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last = line;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };

        if let Some(tile) = open.as_mut() {
            if head == "end" {
                if toks.len() != 1 {
                    return err(line, "`end` takes no arguments");
                }
                let tile = open.take().expect("open tile");
                if let Some(k) = tile.sides.iter().position(Option::is_none) {
                    return err(line, format!("tile `{}` has no {} side", tile.name, SIDES[k].0));
                }
                let sides = tile.sides.map(|g| g.expect("checked above"));
                let t = TileType::new(tile.name, sides, tile.black)
                    .or_else(|e| err(tile.line, e.to_string()))?;
                tiles.push(t);
                continue;
            }
            let Some(k) = SIDES.iter().position(|(s, _)| *s == head) else {
                return err(line, format!("expected a side or `end`, found `{head}`"));
            };
            if toks.len() != 3 {
                return err(line, format!("`{head}` takes a label and a strength"));
            }
            if tile.sides[k].is_some() {
                return err(line, format!("{head} side given twice"));
            }
            tile.sides[k] = Some(parse_glue(line, toks[1], toks[2])?);
            continue;
        }

        match head {
            "temperature" => {
                if toks.len() != 2 {
                    return err(line, "`temperature` takes one integer");
                }
                if temperature.is_some() {
                    return err(line, "temperature given twice");
                }
                let t: u32 = toks[1].parse().or_else(|_| {
                    err(line, format!("temperature `{}` must be a positive integer", toks[1]))
                })?;
                if t == 0 {
                    return err(line, "temperature must be at least 1");
                }
                temperature = Some(t);
            }
            "tile" => {
                let black = match toks.len() {
                    2 => false,
                    3 if toks[2] == "black" => true,
                    _ => return err(line, "expected `tile <name> [black]`"),
                };
                let name = toks[1].to_string();
                if names.insert(name.clone(), line).is_some() {
                    return err(line, format!("duplicate tile name `{name}`"));
                }
                open = Some(PendingTile {
                    line,
                    name,
                    black,
                    sides: Default::default(),
                });
            }
            "seed" => {
                if toks.len() != 4 {
                    return err(line, "expected `seed <x> <y> <name>`");
                }
                let x = parse_int(line, toks[1], "coordinate")?;
                let y = parse_int(line, toks[2], "coordinate")?;
                seeds.push((
                    line,
                    SeedPlacement {
                        pos: Vec2::new(x, y),
                        tile: toks[3].to_string(),
                    },
                ));
            }
            "end" | "north" | "east" | "south" | "west" => {
                return err(line, format!("`{head}` outside a tile block"));
            }
            other => return err(line, format!("unknown keyword `{other}`")),
        }
    }

    if let Some(tile) = open {
        return err(tile.line, format!("tile `{}` is missing `end`", tile.name));
    }
    let Some(temperature) = temperature else {
        return err(last, "missing `temperature` line");
    };
    if seeds.is_empty() {
        return err(last, "at least one `seed` line is required");
    }
    let mut taken = BTreeMap::new();
    for (line, s) in &seeds {
        if !names.contains_key(&s.tile) {
            return err(*line, format!("seed refers to undefined tile `{}`", s.tile));
        }
        if let Some(prev) = taken.insert(s.pos, *line) {
            return err(*line, format!("seed position {} already used on line {prev}", s.pos));
        }
    }
    Ok(TasDocument {
        temperature,
        tiles,
        seed: seeds.into_iter().map(|(_, s)| s).collect(),
    })
}

impl TasDocument {
    pub fn to_system(&self) -> tamlab_core::Result<TileAssemblySystem> {
        let tiles = TileSet::new(self.tiles.clone())?;
        let mut seed = Vec::with_capacity(self.seed.len());
        for s in &self.seed {
            let id = tiles
                .id(&s.tile)
                .ok_or_else(|| tamlab_core::Error::UnknownTileType(s.tile.clone()))?;
            seed.push(Placement::new(s.pos, id));
        }
        TileAssemblySystem::new(tiles, Assembly::from_placements(seed)?, self.temperature)
    }

    pub fn from_system(sys: &TileAssemblySystem) -> Self {
        let tiles = sys.tiles();
        TasDocument {
            temperature: sys.temperature(),
            tiles: tiles.iter().map(|(_, t)| t.clone()).collect(),
            seed: sys
                .seed()
                .placements()
                .map(|pl| SeedPlacement {
                    pos: pl.pos,
                    tile: tiles.tile(pl.tile).name.clone(),
                })
                .collect(),
        }
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        writeln!(out, "temperature {}", self.temperature).unwrap();
        for t in &self.tiles {
            if t.black {
                writeln!(out, "tile {} black", t.name).unwrap();
            } else {
                writeln!(out, "tile {}", t.name).unwrap();
            }
            for (side, d) in SIDES {
                let g = t.glue(d);
                writeln!(out, "  {side} {} {}", g.label().unwrap_or("-"), g.strength()).unwrap();
            }
            out.push_str("end\n");
        }
        for s in &self.seed {
            writeln!(out, "seed {} {} {}", s.pos.x, s.pos.y, s.tile).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tamlab_core::fixtures;

    const MINIMAL: &str = "\
temperature 1
tile solo
  north - 0
  east - 0
  south - 0
  west - 0
end
seed 0 0 solo
";

    #[test]
    fn minimal_document() {
        let doc = parse_tas(MINIMAL).unwrap();
        assert_eq!(doc.temperature, 1);
        assert_eq!(doc.tiles.len(), 1);
        assert_eq!(
            doc.seed,
            vec![SeedPlacement {
                pos: Vec2::ZERO,
                tile: "solo".into()
            }]
        );
        assert_eq!(doc.serialize(), MINIMAL);
    }

    #[test]
    fn comments_and_spacing() {
        let text = "# header\n\ntemperature   2 # trailing\ntile a black\n north x 2\n  west - 0\n east - 0\n south - 0\nend\nseed -3 4 a\n";
        let doc = parse_tas(text).unwrap();
        assert_eq!(doc.temperature, 2);
        assert!(doc.tiles[0].black);
        assert_eq!(doc.tiles[0].glue(Direction::North), &Glue::new("x", 2).unwrap());
        assert_eq!(doc.seed[0].pos, Vec2::new(-3, 4));
    }

    fn line_of(text: &str) -> ParseError {
        parse_tas(text).unwrap_err()
    }

    #[test]
    fn rejects_with_line_numbers() {
        let undefined = MINIMAL.replace("seed 0 0 solo", "seed 0 0 ghost");
        let e = line_of(&undefined);
        assert_eq!(e.line, 8);
        assert!(e.message.contains("ghost"), "{e}");

        let negative = MINIMAL.replace("east - 0", "east a -1");
        let e = line_of(&negative);
        assert_eq!(e.line, 4);
        assert!(e.message.contains("nonnegative"), "{e}");

        let dup = format!("{MINIMAL}tile solo\n north - 0\n east - 0\n south - 0\n west - 0\nend\n");
        assert_eq!(line_of(&dup).line, 9);

        let null_strength = MINIMAL.replace("south - 0", "south - 1");
        assert_eq!(line_of(&null_strength).line, 5);

        let zero_label = MINIMAL.replace("south - 0", "south g 0");
        assert_eq!(line_of(&zero_label).line, 5);

        let missing_side = MINIMAL.replace("  west - 0\n", "");
        assert_eq!(line_of(&missing_side).line, 6);

        assert!(line_of("temperature 1\n").message.contains("seed"));
        assert!(line_of(&MINIMAL.replace("temperature 1\n", ""))
            .message
            .contains("temperature"));
        assert_eq!(line_of(&MINIMAL.replace("temperature 1", "temperature x")).line, 1);
        assert_eq!(line_of(&MINIMAL.replace("end\n", "")).line, 7);
        assert_eq!(line_of("frobnicate\n").line, 1);
        assert_eq!(line_of(&format!("{MINIMAL}seed 0 0 solo\n")).line, 9);
    }

    #[test]
    fn fixtures_round_trip() {
        for sys in [
            fixtures::row(),
            fixtures::comb(),
            fixtures::two_arm(),
            fixtures::sierpinski(),
            fixtures::two_choice(),
            fixtures::blocked_spiral(),
        ] {
            let doc = TasDocument::from_system(&sys);
            let text = doc.serialize();
            let back = parse_tas(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.serialize(), text);
            let rebuilt = back.to_system().unwrap();
            assert_eq!(TasDocument::from_system(&rebuilt), doc);
        }
    }

    #[test]
    fn unstable_seed_is_an_engine_error() {
        let text = "temperature 2\ntile a\n north - 0\n east g 1\n south - 0\n west g 1\nend\nseed 0 0 a\nseed 1 0 a\n";
        let doc = parse_tas(text).unwrap();
        assert!(doc.to_system().is_err());
    }
}
