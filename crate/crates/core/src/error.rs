use thiserror::Error;

use crate::geom::{Vec2, Window};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid glue: {0}")]
    InvalidGlue(String),
    #[error("duplicate tile type name `{0}`")]
    DuplicateTile(String),
    #[error("unknown tile type `{0}`")]
    UnknownTileType(String),
    #[error("invalid tile assembly system: {0}")]
    InvalidSystem(String),
    #[error("window [{x_min}..{x_max}]x[{y_min}..{y_max}] is empty")]
    EmptyWindow {
        x_min: i64,
        y_min: i64,
        x_max: i64,
        y_max: i64,
    },
    #[error("position {0} is already occupied")]
    OccupiedPosition(Vec2),
    #[error("tile `{tile}` cannot attach at {pos}")]
    IllegalAttachment { pos: Vec2, tile: String },
    #[error("seed placement {pos} lies outside window {window}")]
    SeedOutsideWindow { pos: Vec2, window: Window },
    #[error("budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("operation requires temperature 1, system has temperature {0}")]
    WrongTemperature(u32),
    #[error("({i}, {j}) is not a repetition of the path")]
    InvalidRepetition { i: usize, j: usize },
    #[error("generation range of a periodic set part exceeds cap {cap}")]
    DegenerateRange { cap: u64 },
    #[error("fit search space exceeded cap {cap}")]
    SearchSpaceExceeded { cap: u64 },
    #[error("sample point {0} lies outside the fit window")]
    SampleOutsideWindow(Vec2),
    #[error("window {inner} is not contained in {outer}")]
    WindowNotNested { inner: Window, outer: Window },
    #[error("no eventually periodic description with period <= {max_period} fits the probe")]
    ProbeTooNarrow { max_period: usize },
    #[error("window {0} leaves the first quadrant")]
    NegativeWindow(Window),
    #[error("fractal is trivial: {0}")]
    TrivialFractal(String),
    #[error("invalid fractal: {0}")]
    InvalidFractal(String),
}
