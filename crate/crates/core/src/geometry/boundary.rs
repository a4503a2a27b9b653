use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::map::FloatMap;

/// Uniform-angle samples `(θ, X, Y)` of `z(e^{iθ})`. The closing point is
/// implied and not repeated.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve {
    pub samples: Vec<(f64, f64, f64)>,
}

pub fn sample_boundary(map: &FloatMap, n: usize) -> BoundaryCurve {
    let samples = (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64;
            let z = map.eval(Complex64::from_polar(1.0, theta));
            (theta, z.re, z.im)
        })
        .collect();
    BoundaryCurve { samples }
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|&(_, x, y)| (x, y))
    }

    /// Signed shoelace area; positive for counter-clockwise curves.
    pub fn signed_area(&self) -> f64 {
        let n = self.samples.len();
        let mut acc = 0.0;
        for i in 0..n {
            let (_, x0, y0) = self.samples[i];
            let (_, x1, y1) = self.samples[(i + 1) % n];
            acc += x0 * y1 - x1 * y0;
        }
        0.5 * acc
    }

    /// True if no two non-adjacent segments of the closed polyline intersect.
    /// Returns the first offending pair of segment indices otherwise.
    pub fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.samples.len();
        if n < 4 {
            return None;
        }
        let seg = |i: usize| {
            let (_, x0, y0) = self.samples[i];
            let (_, x1, y1) = self.samples[(i + 1) % n];
            ((x0, y0), (x1, y1))
        };
        let boxes: Vec<_> = (0..n)
            .map(|i| {
                let ((x0, y0), (x1, y1)) = seg(i);
                (x0.min(x1), x0.max(x1), y0.min(y1), y0.max(y1))
            })
            .collect();
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (boxes[i], boxes[j]);
                if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                    continue;
                }
                let (p1, p2) = seg(i);
                let (q1, q2) = seg(j);
                if segments_cross(p1, p2, q1, q2) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_simple(&self) -> bool {
        self.first_self_intersection().is_none()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,X,Y\n");
        for (t, x, y) in &self.samples {
            let _ = writeln!(out, "{t:.17e},{x:.17e},{y:.17e}");
        }
        out
    }

    /// A single closed SVG path; the y axis is flipped so the picture matches
    /// the usual orientation of the complex plane.
    pub fn to_svg(&self) -> String {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in self.points() {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(-y);
            ymax = ymax.max(-y);
        }
        let pad = 0.05 * (xmax - xmin).max(ymax - ymin).max(1e-12);
        let (vx, vy) = (xmin - pad, ymin - pad);
        let (vw, vh) = (xmax - xmin + 2.0 * pad, ymax - ymin + 2.0 * pad);
        let stroke = 0.005 * vw.max(vh);
        let mut d = String::new();
        for (k, (x, y)) in self.points().enumerate() {
            let _ = write!(d, "{}{:.9} {:.9} ", if k == 0 { "M" } else { "L" }, x, -y);
        }
        d.push('Z');
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{vx:.9} {vy:.9} {vw:.9} {vh:.9}\">\n\
             <path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"{stroke:.9}\"/>\n</svg>\n"
        )
    }
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}
