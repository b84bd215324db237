use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Point, Rect};

/// Closed polygon given by its vertices in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    /// Simple polygon inside `rect`, at least three vertices.
    pub fn new(vertices: Vec<Point>, rect: Rect) -> Result<Self> {
        let p = Polygon { vertices };
        p.validate(rect)?;
        Ok(p)
    }

    /// Plus sign of arm width 0.2 centred at (0.5, 0.5).
    pub fn cross() -> Self {
        Polygon {
            vertices: vec![
                [0.4, 0.2],
                [0.6, 0.2],
                [0.6, 0.4],
                [0.8, 0.4],
                [0.8, 0.6],
                [0.6, 0.6],
                [0.6, 0.8],
                [0.4, 0.8],
                [0.4, 0.6],
                [0.2, 0.6],
                [0.2, 0.4],
                [0.4, 0.4],
            ],
        }
    }

    pub fn validate(&self, rect: Rect) -> Result<()> {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "polygon needs 3 vertices, got {n}"
            )));
        }
        for (i, p) in v.iter().enumerate() {
            let inside = p[0] >= rect.x0 && p[0] <= rect.x1 && p[1] >= rect.y0 && p[1] <= rect.y1;
            if !(p[0].is_finite() && p[1].is_finite() && inside) {
                return Err(Error::InvalidArgument(format!(
                    "polygon vertex {i} ({}, {}) outside the domain",
                    p[0], p[1]
                )));
            }
        }
        if signed_area(v).abs() <= 1e-14 {
            return Err(Error::InvalidArgument("polygon has zero area".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = (v[i], v[(i + 1) % n]);
                let (c, d) = (v[j], v[(j + 1) % n]);
                let bad = if adjacent {
                    // Shared vertex only; reject folding back along the edge.
                    let shared = if j == i + 1 { b } else { a };
                    let (o1, o2) = if j == i + 1 { (a, d) } else { (b, c) };
                    orient(o1, shared, o2) == 0.0 && dot_from(shared, o1, o2) > 0.0
                } else {
                    segments_intersect(a, b, c, d)
                };
                if bad {
                    return Err(Error::InvalidArgument(format!(
                        "polygon is not simple: edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Even-odd test; points on an edge count as inside.
    pub fn contains(&self, p: Point) -> bool {
        let v = &self.vertices;
        let n = v.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            if on_segment(a, b, p) {
                return true;
            }
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dot_from(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[0] - o[0]) + (a[1] - o[1]) * (b[1] - o[1])
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    let scale = 1e-12 * (1.0 + dot_from(a, b, b).sqrt());
    orient(a, b, p).abs() <= scale * (1.0 + dot_from(a, p, p).sqrt())
        && p[0] >= a[0].min(b[0]) - scale
        && p[0] <= a[0].max(b[0]) + scale
        && p[1] >= a[1].min(b[1]) - scale
        && p[1] <= a[1].max(b[1]) + scale
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(c, d, a) || on_segment(c, d, b) || on_segment(a, b, c) || on_segment(a, b, d)
}
