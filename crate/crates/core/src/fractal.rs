//! Discrete self-similar fractals on the first quadrant: `(x, y)` belongs to
//! the fractal when every base-`c` digit pair `(x_i, y_i)` lies in the
//! generator `G`. Shorter expansions are padded with zeros, and `(0, 0)` has
//! no digits so it is always a member.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Vec2, Window};
use crate::periodic::{fit_union, FitConfig, FitOutcome, SdpUnion};

pub use crate::periodic::NearestMiss;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractalSpec {
    base: u32,
    generator: BTreeSet<(u32, u32)>,
}

impl FractalSpec {
    pub fn new(base: u32, generator: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidFractal(format!("base {base} is below 2")));
        }
        let generator: BTreeSet<(u32, u32)> = generator.into_iter().collect();
        if let Some(&(a, b)) = generator.iter().find(|&&(a, b)| a >= base || b >= base) {
            return Err(Error::InvalidFractal(format!(
                "digit pair ({a}, {b}) out of range for base {base}"
            )));
        }
        Ok(FractalSpec { base, generator })
    }

    /// Base 2 with `G = {(0,0), (0,1), (1,0)}`.
    pub fn sierpinski() -> Self {
        FractalSpec::new(2, [(0, 0), (0, 1), (1, 0)]).expect("valid generator")
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn generator(&self) -> &BTreeSet<(u32, u32)> {
        &self.generator
    }

    /// Membership of a first-quadrant point; `false` off the quadrant.
    pub fn contains(&self, p: Vec2) -> bool {
        if p.x < 0 || p.y < 0 {
            return false;
        }
        let c = self.base as i64;
        let (mut x, mut y) = (p.x, p.y);
        while x > 0 || y > 0 {
            if !self.generator.contains(&((x % c) as u32, (y % c) as u32)) {
                return false;
            }
            x /= c;
            y /= c;
        }
        true
    }
}

pub fn fractal_points(spec: &FractalSpec, w: &Window) -> Result<BTreeSet<Vec2>> {
    if w.x_min < 0 || w.y_min < 0 {
        return Err(Error::NegativeWindow(*w));
    }
    Ok(w.points().filter(|&p| spec.contains(p)).collect())
}

/// Working definition: `G` is a proper nonempty subset of the digit square,
/// the fractal is infinite and it does not lie on a single line.
///
/// `(0, 0)` is always a member, so the fractal is infinite exactly when `G`
/// has a nonzero pair (repeat that digit pair), and collinear exactly when
/// all nonzero pairs of `G` are parallel (every member is a sum of scaled
/// digit pairs).
pub fn is_nontrivial(spec: &FractalSpec) -> bool {
    let full = (spec.base as usize).pow(2);
    if spec.generator.is_empty() || spec.generator.len() == full {
        return false;
    }
    let nonzero: Vec<Vec2> = spec
        .generator
        .iter()
        .map(|&(a, b)| Vec2::new(a as i64, b as i64))
        .filter(|g| !g.is_zero())
        .collect();
    match nonzero.first() {
        None => false,
        Some(&d) => nonzero.iter().any(|g| g.cross(d) != 0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MismatchOutcome {
    NoFit,
    FitFound(SdpUnion),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MismatchReport {
    pub window: Window,
    pub max_parts: usize,
    pub max_coord: i64,
    pub points: usize,
    pub outcome: MismatchOutcome,
    pub candidates: usize,
    pub search_nodes: u64,
    pub nearest_misses: Vec<NearestMiss>,
}

/// Run the bounded fit search on the fractal's points in `w`. `NoFit` means
/// the search was exhausted.
pub fn mismatch_witness(
    spec: &FractalSpec,
    w: &Window,
    max_parts: usize,
    max_coord: i64,
) -> Result<MismatchReport> {
    if !is_nontrivial(spec) {
        return Err(Error::TrivialFractal(format!(
            "base {} with {} generator pairs",
            spec.base,
            spec.generator.len()
        )));
    }
    let sample = fractal_points(spec, w)?;
    let report = fit_union(&sample, w, &FitConfig::new(max_parts, max_coord))?;
    Ok(MismatchReport {
        window: *w,
        max_parts,
        max_coord,
        points: sample.len(),
        outcome: match report.outcome {
            FitOutcome::NoFit => MismatchOutcome::NoFit,
            FitOutcome::Found(u) => MismatchOutcome::FitFound(u),
        },
        candidates: report.candidates,
        search_nodes: report.search_nodes,
        nearest_misses: report.nearest_miss.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn pascal_mod2(n: usize) -> Vec<Vec<u8>> {
        let mut rows = vec![vec![1u8]];
        for r in 1..n {
            let prev = &rows[r - 1];
            let mut row = vec![1u8; r + 1];
            for k in 1..r {
                row[k] = (prev[k - 1] + prev[k]) % 2;
            }
            rows.push(row);
        }
        rows
    }

    #[test]
    fn sierpinski_three_oracles() {
        let spec = FractalSpec::sierpinski();
        let w = Window::square(128);
        let pts = fractal_points(&spec, &w).unwrap();
        let pascal = pascal_mod2(255);
        for p in w.points() {
            let and = p.x & p.y == 0;
            let binom = pascal[(p.x + p.y) as usize][p.x as usize] == 1;
            assert_eq!(pts.contains(&p), and, "{p}");
            assert_eq!(and, binom, "{p}");
        }
    }

    #[test]
    fn sierpinski_small_window() {
        let pts = fractal_points(&FractalSpec::sierpinski(), &Window::square(4)).unwrap();
        let want: BTreeSet<Vec2> = [
            (0, 0),
            (1, 0),
            (2, 0),
            (3, 0),
            (0, 1),
            (2, 1),
            (0, 2),
            (1, 2),
            (0, 3),
        ]
        .into_iter()
        .map(Vec2::from)
        .collect();
        assert_eq!(pts, want);
    }

    #[test]
    fn extreme_generators() {
        let w = Window::square(9);
        let full = FractalSpec::new(3, (0..3).flat_map(|a| (0..3).map(move |b| (a, b)))).unwrap();
        assert_eq!(fractal_points(&full, &w).unwrap().len(), 81);
        assert!(!is_nontrivial(&full));
        let origin = FractalSpec::new(3, [(0, 0)]).unwrap();
        assert_eq!(
            fractal_points(&origin, &w).unwrap().into_iter().collect::<Vec<_>>(),
            vec![v(0, 0)]
        );
        assert!(!is_nontrivial(&origin));
        assert!(is_nontrivial(&FractalSpec::sierpinski()));
    }

    #[test]
    fn origin_is_always_a_member() {
        let spec = FractalSpec::new(2, [(1, 1)]).unwrap();
        assert!(spec.contains(v(0, 0)));
        assert!(spec.contains(v(3, 3)));
        assert!(!spec.contains(v(2, 2)));
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(FractalSpec::new(1, []), Err(Error::InvalidFractal(_))));
        assert!(matches!(FractalSpec::new(2, [(2, 0)]), Err(Error::InvalidFractal(_))));
        let w = Window::new(-1, 0, 3, 3).unwrap();
        assert_eq!(
            fractal_points(&FractalSpec::sierpinski(), &w),
            Err(Error::NegativeWindow(w))
        );
    }

    #[test]
    fn self_similarity() {
        let spec = FractalSpec::new(3, [(0, 0), (2, 0), (1, 1), (0, 2), (2, 2)]).unwrap();
        let pts = fractal_points(&spec, &Window::square(27)).unwrap();
        for p in &pts {
            for &(a, b) in spec.generator() {
                let q = Vec2::new(3 * p.x + a as i64, 3 * p.y + b as i64);
                assert!(spec.contains(q), "{q}");
            }
        }
    }

    #[test]
    fn monotone_windows() {
        let spec = FractalSpec::sierpinski();
        let small = Window::new(3, 5, 20, 17).unwrap();
        let big = Window::square(32);
        let inner: BTreeSet<Vec2> = fractal_points(&spec, &big)
            .unwrap()
            .into_iter()
            .filter(|p| small.contains(*p))
            .collect();
        assert_eq!(fractal_points(&spec, &small).unwrap(), inner);
    }

    #[test]
    fn tiny_window_fits_with_singletons() {
        let r = mismatch_witness(&FractalSpec::sierpinski(), &Window::square(2), 3, 2).unwrap();
        assert!(matches!(r.outcome, MismatchOutcome::FitFound(_)));
    }

    #[test]
    fn diagonal_cantor_is_trivial_but_unfittable() {
        let spec = FractalSpec::new(3, [(0, 0), (1, 1)]).unwrap();
        assert!(!is_nontrivial(&spec));
        let w = Window::square(32);
        assert!(matches!(
            mismatch_witness(&spec, &w, 3, 6),
            Err(Error::TrivialFractal(_))
        ));
        let pts = fractal_points(&spec, &w).unwrap();
        assert_eq!(pts.len(), 12);
        let r = fit_union(&pts, &w, &FitConfig::new(3, 6)).unwrap();
        assert_eq!(r.outcome, FitOutcome::NoFit);
    }
}
