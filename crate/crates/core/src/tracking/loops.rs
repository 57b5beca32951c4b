//! Closed paths in coefficient space and the named loops.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::discriminant::g2_branch;

/// Coordinates in which loop geometry is given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// All of `a₁ … a_{2g+2}`.
    Full { g: usize },
    /// `(a₁, a₂, a₃)` with `a₄ = 1`.
    G1Reduced,
    /// `(a, b, c)` for `(x²+1)³ + x³(ax² + bx + c)`.
    G2Reduced,
}

impl Chart {
    pub fn genus(self) -> usize {
        match self {
            Chart::Full { g } => g,
            Chart::G1Reduced => 1,
            Chart::G2Reduced => 2,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Chart::Full { g } => 2 * g + 2,
            _ => 3,
        }
    }

    /// Spectral coefficients `a₁ … a_{2g+2}` at chart point `p`.
    pub fn lift(self, p: &[f64]) -> Vec<f64> {
        match self {
            Chart::Full { .. } => p.to_vec(),
            Chart::G1Reduced => vec![p[0], p[1], p[2], 1.0],
            Chart::G2Reduced => vec![p[0], 3.0 + p[1], p[2], 3.0, 0.0, 1.0],
        }
    }

    /// Linear part of [`Chart::lift`].
    pub fn lift_velocity(self, v: &[f64]) -> Vec<f64> {
        match self {
            Chart::Full { .. } => v.to_vec(),
            Chart::G1Reduced => vec![v[0], v[1], v[2], 0.0],
            Chart::G2Reduced => vec![v[0], v[1], v[2], 0.0, 0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Segment {
    Line { from: Vec<f64>, to: Vec<f64> },
    /// `center + r(cos θ·u + sin θ·v)`, `θ = θ₀ + 2πt`, `t ∈ [0, 1]`.
    Circle { center: Vec<f64>, u: Vec<f64>, v: Vec<f64>, radius: f64, theta0: f64 },
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

impl Segment {
    /// Point and derivative at `t ∈ [0, 1]`, traversed backwards when `rev`.
    pub fn eval(&self, t: f64, rev: bool) -> (Vec<f64>, Vec<f64>) {
        let (t, sign) = if rev { (1.0 - t, -1.0) } else { (t, 1.0) };
        match self {
            Segment::Line { from, to } => {
                let d: Vec<f64> = to.iter().zip(from).map(|(b, a)| b - a).collect();
                (axpy(t, &d, from), d.iter().map(|x| sign * x).collect())
            }
            Segment::Circle { center, u, v, radius, theta0 } => {
                let th = theta0 + TAU * t;
                let (s, c) = th.sin_cos();
                let p: Vec<f64> = (0..center.len()).map(|k| center[k] + radius * (c * u[k] + s * v[k])).collect();
                let d: Vec<f64> = (0..center.len()).map(|k| sign * radius * TAU * (-s * u[k] + c * v[k])).collect();
                (p, d)
            }
        }
    }

    pub fn start(&self) -> Vec<f64> {
        self.eval(0.0, false).0
    }

    pub fn end(&self) -> Vec<f64> {
        self.eval(1.0, false).0
    }
}

/// The circle around an enclosed discriminant point, used by the
/// Picard–Lefschetz route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub center: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub radius: f64,
    pub theta0: f64,
}

impl Kernel {
    pub fn start(&self) -> Vec<f64> {
        let (s, c) = self.theta0.sin_cos();
        (0..self.center.len()).map(|k| self.center[k] + self.radius * (c * self.u[k] + s * self.v[k])).collect()
    }
}

/// Closed loop based at `segments[0].start()`. The segments describe the
/// positively oriented loop; `orientation = −1` traverses it backwards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterLoop {
    pub chart: Chart,
    pub segments: Vec<Segment>,
    pub orientation: i32,
    pub name: Option<String>,
    pub kernel: Option<Kernel>,
}

impl ParameterLoop {
    /// Closed polyline through `waypoints` (first equal to last).
    pub fn polyline(chart: Chart, waypoints: &[Vec<f64>], orientation: i32, name: Option<String>) -> Self {
        let segments = waypoints.windows(2).map(|w| Segment::Line { from: w[0].clone(), to: w[1].clone() }).collect();
        ParameterLoop { chart, segments, orientation, name, kernel: None }
    }

    /// `base → start of circle → circle → back to base`.
    pub fn lasso(chart: Chart, base: Vec<f64>, kernel: Kernel, orientation: i32, name: Option<String>) -> Self {
        let start = kernel.start();
        let circle = Segment::Circle {
            center: kernel.center.clone(),
            u: kernel.u.clone(),
            v: kernel.v.clone(),
            radius: kernel.radius,
            theta0: kernel.theta0,
        };
        let segments = vec![
            Segment::Line { from: base.clone(), to: start.clone() },
            circle,
            Segment::Line { from: start, to: base },
        ];
        ParameterLoop { chart, segments, orientation, name, kernel: Some(kernel) }
    }

    pub fn genus(&self) -> usize {
        self.chart.genus()
    }

    pub fn base(&self) -> Vec<f64> {
        self.segments[0].start()
    }

    pub fn inverse(&self) -> Self {
        ParameterLoop { orientation: -self.orientation, ..self.clone() }
    }

    /// `self` followed by `other` (same base and chart), both as traversed.
    pub fn then(&self, other: &ParameterLoop) -> Self {
        let mut segments = self.traversed();
        segments.extend(other.traversed());
        ParameterLoop {
            chart: self.chart,
            segments,
            orientation: 1,
            name: match (&self.name, &other.name) {
                (Some(a), Some(b)) => Some(format!("{a}*{b}")),
                _ => None,
            },
            kernel: None,
        }
    }

    /// Segments in traversal order, with reversed circles written out.
    fn traversed(&self) -> Vec<Segment> {
        if self.orientation >= 0 {
            return self.segments.clone();
        }
        self.segments
            .iter()
            .rev()
            .map(|s| match s {
                Segment::Line { from, to } => Segment::Line { from: to.clone(), to: from.clone() },
                Segment::Circle { center, u, v, radius, theta0 } => Segment::Circle {
                    center: center.clone(),
                    u: u.clone(),
                    v: v.iter().map(|x| -x).collect(),
                    radius: *radius,
                    theta0: -theta0,
                },
            })
            .collect()
    }

    /// Pieces in traversal order: chart-space point and velocity as a function
    /// of the local parameter, lifted to complex spectral coefficients.
    pub fn pieces(&self) -> Vec<Box<dyn Fn(f64) -> (Vec<C64>, Vec<C64>) + Send + Sync + '_>> {
        let chart = self.chart;
        self.traversed()
            .into_iter()
            .map(|seg| {
                Box::new(move |t: f64| {
                    let (p, d) = seg.eval(t, false);
                    let lift = |x: Vec<f64>| x.into_iter().map(|v| C64::new(v, 0.0)).collect::<Vec<_>>();
                    (lift(chart.lift(&p)), lift(chart.lift_velocity(&d)))
                }) as Box<dyn Fn(f64) -> (Vec<C64>, Vec<C64>) + Send + Sync>
            })
            .collect()
    }

    /// Spectral coefficients at global parameter `t ∈ [0, 1]` along the
    /// traversed loop (segments share the unit interval equally).
    pub fn point(&self, t: f64) -> Vec<f64> {
        let segs = self.traversed();
        let n = segs.len();
        let x = (t.clamp(0.0, 1.0) * n as f64).min(n as f64 - 1e-15);
        let k = x.floor() as usize;
        self.chart.lift(&segs[k].eval(x - k as f64, false).0)
    }

    pub fn is_closed(&self) -> bool {
        let segs = self.traversed();
        let a = segs[0].start();
        let b = segs.last().map(|s| s.end()).unwrap_or_default();
        segs.windows(2).all(|w| dist(&w[0].end(), &w[1].start()) < 1e-12) && dist(&a, &b) < 1e-12
    }

    /// Waypoints sampled along the loop, first equal to last.
    pub fn waypoints(&self, per_segment: usize) -> Vec<Vec<f64>> {
        let n = self.segments.len() * per_segment;
        (0..=n).map(|k| self.point(k as f64 / n as f64)).collect()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub const CUSHMAN_BASE: [f64; 3] = [0.0, 1.0, 0.0];
pub const KAPPA_BASE: [f64; 3] = [0.03, 0.01, -0.02];
pub const KAPPA_RADIUS: f64 = 0.01;

/// Circle of radius ½ around `(a₁, a₂) = (0, 2)` in the plane `a₃ = 0`,
/// entered at `(0, 3/2, 0)`, negatively oriented.
pub fn cushman_loop(base: [f64; 3]) -> ParameterLoop {
    let kernel = Kernel {
        center: vec![0.0, 2.0, 0.0],
        u: vec![1.0, 0.0, 0.0],
        v: vec![0.0, 1.0, 0.0],
        radius: 0.5,
        theta0: -PI / 2.0,
    };
    ParameterLoop::lasso(Chart::G1Reduced, base.to_vec(), kernel, -1, Some("cushman".into()))
}

fn branch_tangent(c2: f64, sign: f64) -> [f64; 3] {
    let h = 1e-6;
    let p = g2_branch(c2 + h, sign).expect("c2 > 0").abc;
    let m = g2_branch(c2 - h, sign).expect("c2 > 0").abc;
    let t = [p[0] - m[0], p[1] - m[1], p[2] - m[2]];
    let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    [t[0] / n, t[1] / n, t[2] / n]
}

/// Small circle around the half-branch `g2_branch(c2, sign)` in the plane
/// normal to the branch, negatively oriented about the tangent pointing away
/// from the origin.
pub fn branch_loop(base: [f64; 3], c2: f64, sign: f64, radius: f64, name: Option<String>) -> ParameterLoop {
    let p = g2_branch(c2, sign).expect("c2 > 0").abc;
    let mut t = branch_tangent(c2, sign);
    let e = if t[1].abs() < 0.9 { [0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0] };
    let et = e[0] * t[0] + e[1] * t[1] + e[2] * t[2];
    let mut u = [e[0] - et * t[0], e[1] - et * t[1], e[2] - et * t[2]];
    let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u.iter_mut().for_each(|x| *x /= un);
    if c2 < 1.0 {
        t = [-t[0], -t[1], -t[2]];
    }
    let v = [t[1] * u[2] - t[2] * u[1], t[2] * u[0] - t[0] * u[2], t[0] * u[1] - t[1] * u[0]];
    let kernel = Kernel { center: p.to_vec(), u: u.to_vec(), v: v.to_vec(), radius, theta0: 0.0 };
    ParameterLoop::lasso(Chart::G2Reduced, base.to_vec(), kernel, -1, name)
}

pub fn kappa_loop(k: usize, base: [f64; 3]) -> Option<ParameterLoop> {
    let (c2, sign) = match k {
        1 => (1.15, -1.0),
        2 => (1.15, 1.0),
        3 => (0.85, 1.0),
        _ => return None,
    };
    Some(branch_loop(base, c2, sign, KAPPA_RADIUS, Some(format!("kappa{k}"))))
}

/// `cushman`, `kappa1`, `kappa2`, `kappa3` at their default base points.
pub fn named_loop(name: &str) -> Option<ParameterLoop> {
    match name {
        "cushman" => Some(cushman_loop(CUSHMAN_BASE)),
        "kappa1" => kappa_loop(1, KAPPA_BASE),
        "kappa2" => kappa_loop(2, KAPPA_BASE),
        "kappa3" => kappa_loop(3, KAPPA_BASE),
        _ => None,
    }
}

pub fn named_loop_at(name: &str, base: &[f64]) -> Option<ParameterLoop> {
    let b: [f64; 3] = base.try_into().ok()?;
    match name {
        "cushman" => Some(cushman_loop(b)),
        "kappa1" => kappa_loop(1, b),
        "kappa2" => kappa_loop(2, b),
        "kappa3" => kappa_loop(3, b),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_loops_close() {
        for n in ["cushman", "kappa1", "kappa2", "kappa3"] {
            let l = named_loop(n).unwrap();
            assert!(l.is_closed(), "{n}");
            assert!(l.inverse().is_closed());
            assert_eq!(l.orientation, -1);
        }
    }

    #[test]
    fn reversal_retraces() {
        let l = cushman_loop(CUSHMAN_BASE);
        let r = l.inverse();
        for k in 0..=30 {
            let t = k as f64 / 30.0;
            let a = l.point(t);
            let b = r.point(1.0 - t);
            assert!(dist(&a, &b) < 1e-12, "{t}");
        }
    }

    #[test]
    fn cushman_circle_passes_expected_points() {
        let l = cushman_loop(CUSHMAN_BASE);
        // Negative orientation: after a quarter of the circle we are at a₁ = −½.
        let p = l.point(1.0 / 3.0 + 0.25 / 3.0);
        assert!((p[0] + 0.5).abs() < 1e-12 && (p[1] - 2.0).abs() < 1e-12);
    }
}
