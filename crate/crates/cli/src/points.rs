//! Point-set files: one `x y` pair per line, `#` comments, any order.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use tamlab_core::Vec2;

use crate::tas::ParseError;

pub fn parse_points(text: &str) -> Result<BTreeSet<Vec2>, ParseError> {
    let mut out = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [x, y] => {
                let coord = |t: &str| {
                    t.parse::<i64>().map_err(|_| ParseError {
                        line,
                        message: format!("`{t}` is not an integer coordinate"),
                    })
                };
                out.insert(Vec2::new(coord(x)?, coord(y)?));
            }
            _ => {
                return Err(ParseError {
                    line,
                    message: format!("expected `x y`, found {} tokens", toks.len()),
                })
            }
        }
    }
    Ok(out)
}

/// Points in row-major order, bottom row first.
pub fn write_points(points: &BTreeSet<Vec2>) -> String {
    let mut sorted: Vec<Vec2> = points.iter().copied().collect();
    sorted.sort_by_key(|p| p.row_major());
    let mut out = String::new();
    for p in sorted {
        writeln!(out, "{} {}", p.x, p.y).unwrap();
    }
    out
}
