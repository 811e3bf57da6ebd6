//! Integer lattice vectors and rectangular windows.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or displacement) of the integer lattice.
///
/// The derived ordering is lexicographic on `(x, y)`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Vec2 {
    pub x: i64,
    pub y: i64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Vec2 { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Vec2) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Vec2) -> i64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_inf(self) -> i64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn norm_l1(self) -> i64 {
        self.x.abs() + self.y.abs()
    }

    /// Row-major key `(y, x)`, the order used for growth tie-breaking.
    pub fn row_major(self) -> (i64, i64) {
        (self.y, self.x)
    }

    pub fn is_adjacent(self, other: Vec2) -> bool {
        (self - other).norm_l1() == 1
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<Vec2> for i64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self * rhs.x, self * rhs.y)
    }
}

impl From<(i64, i64)> for Vec2 {
    fn from((x, y): (i64, i64)) -> Self {
        Vec2::new(x, y)
    }
}

/// Closed axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Window {
    pub fn new(x_min: i64, y_min: i64, x_max: i64, y_max: i64) -> Result<Self> {
        if x_min > x_max || y_min > y_max {
            return Err(Error::EmptyWindow {
                x_min,
                y_min,
                x_max,
                y_max,
            });
        }
        Ok(Window {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// `[0, side-1]²`. Panics if `side` is zero.
    pub fn square(side: i64) -> Self {
        Window::new(0, 0, side - 1, side - 1).expect("square window needs a positive side")
    }

    pub fn width(&self) -> i64 {
        self.x_max - self.x_min + 1
    }

    pub fn height(&self) -> i64 {
        self.y_max - self.y_min + 1
    }

    pub fn point_count(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    /// Grow by `margin` on every side.
    pub fn padded(&self, margin: i64) -> Window {
        Window {
            x_min: self.x_min - margin,
            x_max: self.x_max + margin,
            y_min: self.y_min - margin,
            y_max: self.y_max + margin,
        }
    }

    /// Row-major index of `p` (must be inside).
    pub fn index_of(&self, p: Vec2) -> usize {
        debug_assert!(self.contains(p));
        ((p.y - self.y_min) * self.width() + (p.x - self.x_min)) as usize
    }

    pub fn point_at(&self, idx: usize) -> Vec2 {
        let w = self.width();
        let idx = idx as i64;
        Vec2::new(self.x_min + idx % w, self.y_min + idx / w)
    }

    /// All points in row-major order (y outer, x inner).
    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        (self.y_min..=self.y_max)
            .flat_map(move |y| (self.x_min..=self.x_max).map(move |x| Vec2::new(x, y)))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}..{}]x[{}..{}]",
            self.x_min, self.x_max, self.y_min, self.y_max
        )
    }
}
