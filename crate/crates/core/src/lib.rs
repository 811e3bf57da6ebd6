//! Simulation and analysis for the abstract Tile Assembly Model at
//! temperature 1 (with temperature 2 supported by the engine).
//!
//! * [`model`]: tiles, glues, assemblies, binding and stability.
//! * [`engine`]: windowed growth, black sets, producible enumeration and
//!   directedness.
//! * [`paths`]: seed-rooted tile paths, repetitions and pumping.
//! * [`periodic`]: semi-doubly periodic sets `{b + n·u + m·v : n, m ≥ 0}`,
//!   their unions, and fitting unions to observed point sets.
//! * [`fractal`]: discrete self-similar fractals and the bounded
//!   no-fit search against them.

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod fractal;
pub mod geom;
pub mod model;
pub mod paths;
pub mod periodic;

pub use error::{Error, Result};
pub use geom::{Vec2, Window};
pub use model::{
    interaction_strength, is_tau_stable, Assembly, Direction, Glue, Placement,
    TileAssemblySystem, TileId, TileSet, TileType,
};
