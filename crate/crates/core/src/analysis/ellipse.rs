use std::fmt::Write;

use serde::Serialize;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// Upper arc of `3(x+y−1)² + (x−y)² = 3/4` between its axis tangency points.
    Ellipse,
    /// `x + y = 3/2` between `(1/2, 1)` and `(1, 1/2)`, the part of the star
    /// bound `h⁺_ij + h⁺_jk ≤ 1/2` where both terms are positive.
    Monogamy,
}

impl Curve {
    pub fn name(self) -> &'static str {
        match self {
            Curve::Ellipse => "ellipse",
            Curve::Monogamy => "monogamy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint<T> {
    pub curve: Curve,
    pub x: T,
    pub y: T,
}

/// `samples` points on each curve, endpoints included.
///
/// The ellipse has centre `(1/2, 1/2)`; in `s = x + y`, `d = x − y` it reads
/// `s = 1 + cos θ/2`, `d = (√3/2) sin θ`, and `θ ∈ [−2π/3, 2π/3]` runs from
/// `(0, 3/4)` over `(3/4, 3/4)` to `(3/4, 0)`.
pub fn ellipse_region_data<T: Real>(samples: usize) -> Vec<BoundaryPoint<T>> {
    assert!(samples >= 2, "at least two samples per curve");
    let half = T::lit(0.5);
    let last = T::from_count(samples - 1);
    let span = T::two_pi() / T::lit(3.0);
    let root3_half = T::lit(3.0).sqrt() * half;
    let mut out = Vec::with_capacity(2 * samples);
    for k in 0..samples {
        let t = T::from_count(k) / last;
        let theta = -span + T::two() * span * t;
        let s = T::one() + theta.cos() * half;
        let d = root3_half * theta.sin();
        // The endpoints sit on the axes; keep them there exactly.
        let x = ((s + d) * half).max(T::zero());
        let y = ((s - d) * half).max(T::zero());
        let (x, y) = if k == 0 {
            (T::zero(), T::lit(0.75))
        } else if k + 1 == samples {
            (T::lit(0.75), T::zero())
        } else {
            (x, y)
        };
        out.push(BoundaryPoint { curve: Curve::Ellipse, x, y });
    }
    for k in 0..samples {
        let t = T::from_count(k) / last;
        let x = half + half * t;
        out.push(BoundaryPoint { curve: Curve::Monogamy, x, y: T::lit(1.5) - x });
    }
    out
}

pub fn to_csv<T: Real>(points: &[BoundaryPoint<T>]) -> String {
    let mut s = String::from("curve,x,y\n");
    for p in points {
        writeln!(s, "{},{},{}", p.curve.name(), p.x, p.y).expect("write to string");
    }
    s
}
