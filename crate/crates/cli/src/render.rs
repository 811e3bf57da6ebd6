//! Text and SVG pictures of an assembly on a window, `y` growing upward.

use std::fmt::Write as _;

use tamlab_core::{Assembly, TileSet, Vec2, Window};

/// One line per row, top row first: `#` black tile, `*` other tile, `.`
/// empty.
pub fn ascii(tiles: &TileSet, asm: &Assembly, w: &Window) -> String {
    let mut out = String::with_capacity(w.point_count() as usize + w.height() as usize);
    for y in (w.y_min..=w.y_max).rev() {
        for x in w.x_min..=w.x_max {
            out.push(match asm.get(Vec2::new(x, y)) {
                None => '.',
                Some(t) if tiles.tile(t).black => '#',
                Some(_) => '*',
            });
        }
        out.push('\n');
    }
    out
}

const CELL: i64 = 10;

/// One unit square per tile; black tiles filled black, others white, seed
/// tiles outlined in red.
pub fn svg(tiles: &TileSet, asm: &Assembly, seed: &Assembly, w: &Window) -> String {
    let (width, height) = (w.width() * CELL, w.height() * CELL);
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, r##"<rect x="0" y="0" width="{width}" height="{height}" fill="#f4f4f4"/>"##)
        .unwrap();
    let corner = |p: Vec2| ((p.x - w.x_min) * CELL, (w.y_max - p.y) * CELL);
    let mut placed: Vec<_> = asm.placements().filter(|pl| w.contains(pl.pos)).collect();
    placed.sort_by_key(|pl| pl.pos.row_major());
    for pl in &placed {
        let (x, y) = corner(pl.pos);
        let fill = if tiles.tile(pl.tile).black { "#000000" } else { "#ffffff" };
        writeln!(
            out,
            r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#888888" stroke-width="0.5"><title>{} {}</title></rect>"##,
            tiles.tile(pl.tile).name,
            pl.pos
        )
        .unwrap();
    }
    let mut seeds: Vec<Vec2> = seed.positions().filter(|p| w.contains(*p)).collect();
    seeds.sort_by_key(|p| p.row_major());
    for p in seeds {
        let (x, y) = corner(p);
        writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#d01010" stroke-width="2"/>"##,
            x + 1,
            y + 1,
            CELL - 2,
            CELL - 2
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
