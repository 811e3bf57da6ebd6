//! JSON reports. Objects are emitted with sorted keys and nothing
//! time-dependent, so identical inputs give identical bytes.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use tamlab_core::engine::ConflictWitness;
use tamlab_core::paths::TilePath;
use tamlab_core::periodic::{SdpSet, SdpUnion};
use tamlab_core::{Placement, TileSet, Vec2, Window};

pub const REPORT_VERSION: &str = "tamlab-report/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub struct Report {
    command: &'static str,
    inputs: Map<String, Value>,
    parameters: Map<String, Value>,
    outcome: Value,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            command,
            inputs: Map::new(),
            parameters: Map::new(),
            outcome: Value::Null,
        }
    }

    pub fn input(mut self, name: &str, bytes: &[u8]) -> Self {
        self.inputs
            .insert(name.into(), json!({ "sha256": sha256_hex(bytes), "bytes": bytes.len() }));
        self
    }

    pub fn param(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(name.into(), value.into());
        self
    }

    pub fn outcome(mut self, outcome: Value) -> Self {
        self.outcome = outcome;
        self
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "version": REPORT_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "outcome": self.outcome,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn point(p: Vec2) -> Value {
    json!([p.x, p.y])
}

pub fn points<'a>(ps: impl IntoIterator<Item = &'a Vec2>) -> Value {
    let mut v: Vec<Vec2> = ps.into_iter().copied().collect();
    v.sort_by_key(|p| p.row_major());
    Value::Array(v.into_iter().map(point).collect())
}

pub fn window(w: &Window) -> Value {
    json!([w.x_min, w.y_min, w.x_max, w.y_max])
}

pub fn placement(tiles: &TileSet, pl: &Placement) -> Value {
    json!([pl.pos.x, pl.pos.y, tiles.tile(pl.tile).name])
}

pub fn trace(tiles: &TileSet, steps: &[Placement]) -> Value {
    Value::Array(steps.iter().map(|pl| placement(tiles, pl)).collect())
}

pub fn path(tiles: &TileSet, p: &TilePath) -> Value {
    trace(tiles, p.steps())
}

/// A part as the integer triple `[b, u, v]`.
pub fn part(a: &SdpSet) -> Value {
    json!([[a.b.x, a.b.y], [a.u.x, a.u.y], [a.v.x, a.v.y]])
}

pub fn union(u: &SdpUnion) -> Value {
    Value::Array(u.parts.iter().map(part).collect())
}

pub fn witness(tiles: &TileSet, w: &ConflictWitness) -> Value {
    json!({
        "position": point(w.pos),
        "tile_a": tiles.tile(w.tile_a).name,
        "tile_b": tiles.tile(w.tile_b).name,
        "trace_a": trace(tiles, &w.trace_a),
        "trace_b": trace(tiles, &w.trace_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_versioned() {
        let r = Report::new("demo")
            .input("tas", b"abc")
            .param("zeta", 1)
            .param("alpha", 2)
            .outcome(json!({"b": 1, "a": 2}));
        let text = r.to_json();
        let top: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim())
            .collect();
        assert!(top[0].starts_with("\"command\""));
        assert!(top.last().unwrap().starts_with("\"version\""));
        assert!(text.find("\"alpha\"").unwrap() < text.find("\"zeta\"").unwrap());
        assert!(text.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        assert_eq!(text, r.to_json());
    }
}
