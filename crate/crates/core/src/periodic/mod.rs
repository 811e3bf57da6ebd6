//! Semi-doubly periodic sets `{b + n·u + m·v : n, m ∈ ℕ}` and finite unions
//! of them: exact membership, window readout, comparison, and the
//! eventually periodic structure of a single row.

mod fit;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Vec2, Window};

pub use fit::{
    fit_union, predictive_check, FitConfig, FitOutcome, FitReport, NearestMiss, Prediction,
};

/// Default cap on the number of lattice coefficients scanned per part in
/// [`window_points`].
pub const DEFAULT_GENERATION_CAP: u64 = 1 << 26;

/// `{b + n·u + m·v : n, m ≥ 0}`. With `u = v = 0` this is `{b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SdpSet {
    pub b: Vec2,
    pub u: Vec2,
    pub v: Vec2,
}

impl SdpSet {
    pub const fn new(b: Vec2, u: Vec2, v: Vec2) -> Self {
        SdpSet { b, u, v }
    }

    pub fn singleton(b: Vec2) -> Self {
        SdpSet::new(b, Vec2::ZERO, Vec2::ZERO)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        contains_sdp(self, p)
    }
}

impl fmt::Display for SdpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b={} u={} v={}", self.b, self.u, self.v)
    }
}

/// Finite union of [`SdpSet`]s; the empty union is the empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SdpUnion {
    pub parts: Vec<SdpSet>,
}

impl SdpUnion {
    pub fn new(parts: Vec<SdpSet>) -> Self {
        SdpUnion { parts }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        contains_union(self, p)
    }

    /// Sorted, duplicates removed. Denotes the same set.
    pub fn dedup(&self) -> SdpUnion {
        let parts: BTreeSet<SdpSet> = self.parts.iter().copied().collect();
        SdpUnion {
            parts: parts.into_iter().collect(),
        }
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub(crate) fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// A solution of `n·a + m·c = t` in nonnegative integers, if one exists.
pub fn nonneg_solution(a: i64, c: i64, t: i64) -> Option<(i64, i64)> {
    match (a, c) {
        (0, 0) => (t == 0).then_some((0, 0)),
        (0, c) => (t % c == 0 && t / c >= 0).then(|| (0, t / c)),
        (a, 0) => (t % a == 0 && t / a >= 0).then(|| (t / a, 0)),
        (a, c) => {
            let (g, x, _) = extended_gcd(a, c);
            if t % g != 0 {
                return None;
            }
            // n ≡ x·t/g (mod c/g); pick the least nonnegative representative
            // so that m = (t - n·a)/c is as favourable as possible.
            let modulus = (c / g).abs();
            let n0 = ((x as i128 * (t / g) as i128).rem_euclid(modulus as i128)) as i64;
            let m0 = (t - n0 * a) / c;
            if (a > 0) == (c > 0) {
                // same sign: every solution is (n0 + k·|c/g|, m0 ∓ k·|a/g|)
                // with m shrinking as n grows
                (m0 >= 0).then_some((n0, m0))
            } else {
                // opposite signs: the kernel (|c/g|, |a/g|) raises both
                let step_m = (a / g).abs();
                if m0 >= 0 {
                    Some((n0, m0))
                } else {
                    let k = (-m0 + step_m - 1) / step_m;
                    Some((n0 + k * modulus, m0 + k * step_m))
                }
            }
        }
    }
}

/// Coefficients `(n, m) ∈ ℕ²` with `p = b + n·u + m·v`, if any exist.
pub fn sdp_coefficients(a: &SdpSet, p: Vec2) -> Option<(i64, i64)> {
    let t = p - a.b;
    let (u, v) = (a.u, a.v);
    let det = u.cross(v);
    if det != 0 {
        let n_num = t.cross(v);
        let m_num = u.cross(t);
        if n_num % det != 0 || m_num % det != 0 {
            return None;
        }
        let (n, m) = (n_num / det, m_num / det);
        return (n >= 0 && m >= 0).then_some((n, m));
    }
    if u.is_zero() && v.is_zero() {
        return t.is_zero().then_some((0, 0));
    }
    // parallel periods: reduce to one dimension along the primitive direction
    let dir = if u.is_zero() { v } else { u };
    let g = gcd(dir.x, dir.y);
    let prim = Vec2::new(dir.x / g, dir.y / g);
    if t.cross(prim) != 0 {
        return None;
    }
    let along = |w: Vec2| -> i64 {
        if prim.x != 0 {
            w.x / prim.x
        } else {
            w.y / prim.y
        }
    };
    nonneg_solution(along(u), along(v), along(t))
}

/// `p ∈ {b + n·u + m·v : n, m ∈ ℕ}`.
pub fn contains_sdp(a: &SdpSet, p: Vec2) -> bool {
    sdp_coefficients(a, p).is_some()
}

pub fn contains_union(u: &SdpUnion, p: Vec2) -> bool {
    u.parts.iter().any(|a| contains_sdp(a, p))
}

/// Inclusive integer range covering `num(q)/den` over the window corners.
pub(crate) fn corner_range(w: &Window, den: i64, num: impl Fn(Vec2) -> i64) -> (i64, i64) {
    let corners = [
        Vec2::new(w.x_min, w.y_min),
        Vec2::new(w.x_min, w.y_max),
        Vec2::new(w.x_max, w.y_min),
        Vec2::new(w.x_max, w.y_max),
    ];
    let mut lo = i128::MAX;
    let mut hi = i128::MIN;
    for q in corners {
        let (n, d) = (num(q) as i128, den as i128);
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        lo = lo.min(n.div_euclid(d));
        hi = hi.max(-(-n).div_euclid(d));
    }
    (lo as i64, hi as i64)
}

/// Points of one part inside `w`, by forward generation over the
/// coefficient ranges that can land in the window.
pub fn part_window_points(a: &SdpSet, w: &Window, cap: u64) -> Result<Vec<Vec2>> {
    let (u, v) = (a.u, a.v);
    let det = u.cross(v);
    let mut out = Vec::new();
    if u.is_zero() && v.is_zero() {
        if w.contains(a.b) {
            out.push(a.b);
        }
        return Ok(out);
    }
    if det != 0 {
        let (n_lo, n_hi) = corner_range(w, det, |q| (q - a.b).cross(v));
        let (m_lo, m_hi) = corner_range(w, det, |q| u.cross(q - a.b));
        let (n_lo, m_lo) = (n_lo.max(0), m_lo.max(0));
        if n_hi < n_lo || m_hi < m_lo {
            return Ok(out);
        }
        let count = (n_hi - n_lo + 1) as u64 * (m_hi - m_lo + 1) as u64;
        if count > cap {
            return Err(Error::DegenerateRange { cap });
        }
        for n in n_lo..=n_hi {
            for m in m_lo..=m_hi {
                let p = a.b + n * u + m * v;
                if w.contains(p) {
                    out.push(p);
                }
            }
        }
        return Ok(out);
    }
    // one common direction: walk the line through b
    let dir = if u.is_zero() { v } else { u };
    let g = gcd(dir.x, dir.y);
    let prim = Vec2::new(dir.x / g, dir.y / g);
    let mut lo = i64::MIN / 4;
    let mut hi = i64::MAX / 4;
    for (base, step, min, max) in [
        (a.b.x, prim.x, w.x_min, w.x_max),
        (a.b.y, prim.y, w.y_min, w.y_max),
    ] {
        if step == 0 {
            if base < min || base > max {
                return Ok(out);
            }
            continue;
        }
        let (l, h) = if step > 0 {
            ((min - base).div_euclid(step) + i64::from((min - base).rem_euclid(step) != 0), (max - base).div_euclid(step))
        } else {
            let s = -step;
            ((base - max).div_euclid(s) + i64::from((base - max).rem_euclid(s) != 0), (base - min).div_euclid(s))
        };
        lo = lo.max(l);
        hi = hi.min(h);
    }
    if hi < lo {
        return Ok(out);
    }
    if (hi - lo + 1) as u64 > cap {
        return Err(Error::DegenerateRange { cap });
    }
    for k in lo..=hi {
        let p = a.b + k * prim;
        if contains_sdp(a, p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// `{p ∈ w : p ∈ U}`.
pub fn window_points(union: &SdpUnion, w: &Window) -> Result<BTreeSet<Vec2>> {
    window_points_capped(union, w, DEFAULT_GENERATION_CAP)
}

pub fn window_points_capped(union: &SdpUnion, w: &Window, cap: u64) -> Result<BTreeSet<Vec2>> {
    let mut out = BTreeSet::new();
    for part in &union.parts {
        out.extend(part_window_points(part, w, cap)?);
    }
    Ok(out)
}

/// The least point of `w` (in `(x, y)` order) where the two unions
/// disagree, or `None` if they agree on all of `w`.
pub fn equal_on_window(a: &SdpUnion, b: &SdpUnion, w: &Window) -> Option<Vec2> {
    (w.x_min..=w.x_max)
        .flat_map(|x| (w.y_min..=w.y_max).map(move |y| Vec2::new(x, y)))
        .find(|&p| a.contains(p) != b.contains(p))
}

/// The least mismatch between `U` and an explicit point set on `w`.
pub fn first_mismatch(union: &SdpUnion, points: &BTreeSet<Vec2>, w: &Window) -> Option<Vec2> {
    (w.x_min..=w.x_max)
        .flat_map(|x| (w.y_min..=w.y_max).map(move |y| Vec2::new(x, y)))
        .find(|&p| union.contains(p) != points.contains(&p))
}

/// Membership along one row from `left_bound` eastward, as a unary
/// automaton: `preperiod` transient states followed by a cycle of `period`
/// states.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventuallyPeriodicRow {
    pub y: i64,
    pub left_bound: i64,
    pub preperiod: usize,
    pub period: usize,
    pub prefix_members: Vec<bool>,
    pub cycle_members: Vec<bool>,
}

impl EventuallyPeriodicRow {
    /// Automaton state reached after reading `x - left_bound` symbols.
    pub fn state(&self, x: i64) -> Option<usize> {
        if x < self.left_bound {
            return None;
        }
        let k = (x - self.left_bound) as usize;
        Some(if k < self.preperiod {
            k
        } else {
            self.preperiod + (k - self.preperiod) % self.period
        })
    }

    /// `None` west of `left_bound`.
    pub fn contains(&self, x: i64) -> Option<bool> {
        self.state(x).map(|s| {
            if s < self.preperiod {
                self.prefix_members[s]
            } else {
                self.cycle_members[s - self.preperiod]
            }
        })
    }
}

/// Least eventually periodic description (smallest period, then smallest
/// preperiod) of row `y` of `U` consistent with `probe_width` membership
/// bits starting at `left_bound`, certified on three further periods.
pub fn row_slice(
    union: &SdpUnion,
    y: i64,
    left_bound: i64,
    probe_width: usize,
) -> Result<EventuallyPeriodicRow> {
    let bits: Vec<bool> = (0..probe_width)
        .map(|k| union.contains(Vec2::new(left_bound + k as i64, y)))
        .collect();
    let max_period = probe_width / 3;
    for period in 1..=max_period {
        let last_violation = (0..probe_width - period)
            .rev()
            .find(|&k| bits[k] != bits[k + period]);
        let preperiod = last_violation.map_or(0, |k| k + 1);
        if preperiod + period > probe_width {
            continue;
        }
        let row = EventuallyPeriodicRow {
            y,
            left_bound,
            preperiod,
            period,
            prefix_members: bits[..preperiod].to_vec(),
            cycle_members: bits[preperiod..preperiod + period].to_vec(),
        };
        let certified = (probe_width..probe_width + 3 * period).all(|k| {
            let x = left_bound + k as i64;
            row.contains(x) == Some(union.contains(Vec2::new(x, y)))
        });
        if certified {
            return Ok(row);
        }
    }
    Err(Error::ProbeTooNarrow { max_period })
}
