//! Contour integrals of `x^k dx/y` and `y dx/x²` on `y² = f(x)`, with `y`
//! continued step by step from the reference sheet.
//!
//! Reference sheet: `y_c(z) = Π_k (z − m_k)·√(1 − d_k²/(z − m_k)²)` over the
//! root pairs `(p_k, q_k)`, `m_k` the midpoint and `d_k = (q_k − p_k)/2`, with
//! the principal square root. Its cuts are the pair segments and
//! `y_c ~ +x^{g+1}` at infinity.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::exec::Exec;
use crate::homology::{BranchConfig, HomologyError};
use crate::poly::{ComplexPoly, PolyError};
use crate::spectral::SpectralCoeffs;

pub const DEFAULT_TOL: f64 = 1e-10;
const MIN_NODES: usize = 256;
const MAX_NODES: usize = 1 << 17;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("contour does not close on the curve (it encloses an odd number of branch points)")]
    NotClosed,
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e}) with {nodes} nodes")]
    NoConvergence { tol: f64, change: f64, nodes: usize },
    #[error("contour clearance {available:e} is below the requested {requested:e} near {location}")]
    Clearance { requested: f64, available: f64, location: C64 },
    #[error("parameters not in the no-real-root component")]
    NotInComponent,
    #[error("only implemented for genus {0}")]
    Genus(usize),
    #[error("result has a large imaginary part {0:e}")]
    NotReal(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Differential {
    /// `x^k dx / y`, `k ≥ −1`.
    XPow(i32),
    /// `y dx / x²`.
    YOverX2,
}

/// `center + axis·(a cos t + i b sin t)`, `t ∈ [0, 2π)`; CCW for `orientation = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub center: C64,
    pub axis: C64,
    pub a: f64,
    pub b: f64,
    pub orientation: i32,
}

impl Ellipse {
    /// Ellipse around the segment `[p, q]` with the given margin, starting past `q`.
    pub fn around_segment(p: C64, q: C64, margin: f64) -> Self {
        let d = (q - p) / 2.0;
        let len = d.norm();
        Ellipse { center: (p + q) / 2.0, axis: d / len, a: len + margin, b: margin, orientation: 1 }
    }

    pub fn circle(center: C64, r: f64, orientation: i32) -> Self {
        Ellipse { center, axis: C64::new(1.0, 0.0), a: r, b: r, orientation }
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }

    pub fn point(&self, t: f64) -> (C64, C64) {
        let s = self.orientation as f64;
        let (st, ct) = (s * t).sin_cos();
        let z = self.center + self.axis * C64::new(self.a * ct, self.b * st);
        let dz = self.axis * C64::new(-self.a * st, self.b * ct) * s;
        (z, dz)
    }

    /// Distance from `x` to the ellipse, sampled.
    pub fn distance_to(&self, x: C64) -> f64 {
        (0..720).map(|k| (self.point(TAU * k as f64 / 720.0).0 - x).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// A closed contour as points with the continued `y` on it.
#[derive(Clone, Debug)]
pub struct TracedContour {
    pub z: Vec<C64>,
    pub dz: Vec<C64>,
    pub y: Vec<C64>,
}

pub fn reference_sheet(pairs: &[(C64, C64)], z: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    pairs.iter().fold(one, |acc, &(p, q)| {
        let m = (p + q) / 2.0;
        let d = (q - p) / 2.0;
        let w = z - m;
        acc * w * (one - d * d / (w * w)).sqrt()
    })
}

fn continue_sqrt(fz: C64, prev: C64) -> C64 {
    let s = fz.sqrt();
    if (s - prev).norm_sqr() <= (s + prev).norm_sqr() {
        s
    } else {
        -s
    }
}

/// Continue `y = √f` along the points of `z` from `y0`; `None` when a step is
/// too coarse (arg f changes by ≥ π/2) or the loop does not close.
fn trace_y(f: &ComplexPoly, z: &[C64], y0: C64) -> Result<Option<Vec<C64>>, PeriodError> {
    let mut ys = Vec::with_capacity(z.len());
    let mut y = y0;
    let mut fprev = f.eval(z[0]);
    for &zk in z {
        let fz = f.eval(zk);
        if (fz / fprev).arg().abs() >= PI / 2.0 {
            return Ok(None);
        }
        fprev = fz;
        y = continue_sqrt(fz, y);
        ys.push(y);
    }
    let fz0 = f.eval(z[0]);
    if (fz0 / fprev).arg().abs() >= PI / 2.0 {
        return Ok(None);
    }
    let back = continue_sqrt(fz0, y);
    if (back - ys[0]).norm() > 1e-6 * ys[0].norm().max(1e-300) {
        return Err(PeriodError::NotClosed);
    }
    Ok(Some(ys))
}

pub fn trace_ellipse(f: &ComplexPoly, e: &Ellipse, y0: C64, n: usize) -> Result<TracedContour, PeriodError> {
    let mut n = n.max(16);
    loop {
        let (z, dz): (Vec<C64>, Vec<C64>) = (0..n).map(|k| e.point(TAU * k as f64 / n as f64)).unzip();
        match trace_y(f, &z, y0)? {
            Some(y) => return Ok(TracedContour { z, dz, y }),
            None if n < MAX_NODES => n *= 2,
            None => return Err(PeriodError::NoConvergence { tol: 0.0, change: f64::NAN, nodes: n }),
        }
    }
}

fn eval_form(d: Differential, z: C64, y: C64) -> C64 {
    match d {
        Differential::XPow(k) => z.powi(k) / y,
        Differential::YOverX2 => y / (z * z),
    }
}

/// Trapezoid sums of several differentials over an ellipse, doubling the node
/// count until every value changes by less than `tol`.
pub fn ellipse_integrals(
    f: &ComplexPoly,
    e: &Ellipse,
    y0: C64,
    forms: &[Differential],
    tol: f64,
) -> Result<Vec<C64>, PeriodError> {
    let mut n = MIN_NODES;
    let mut prev: Option<Vec<C64>> = None;
    loop {
        let tc = trace_ellipse(f, e, y0, n)?;
        n = tc.z.len();
        let w = TAU / n as f64;
        let vals: Vec<C64> = forms
            .iter()
            .map(|&d| tc.z.iter().zip(&tc.dz).zip(&tc.y).map(|((&z, &dz), &y)| eval_form(d, z, y) * dz).sum::<C64>() * w)
            .collect();
        if let Some(p) = &prev {
            let change = p.iter().zip(&vals).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if change < tol {
                return Ok(vals);
            }
            if n >= MAX_NODES {
                return Err(PeriodError::NoConvergence { tol, change, nodes: n });
            }
        }
        prev = Some(vals);
        n *= 2;
    }
}

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Composite 8-point Gauss–Legendre over a closed polyline, refining the
/// number of pieces per edge until converged.
pub fn polyline_integrals(
    f: &ComplexPoly,
    vertices: &[C64],
    y0: C64,
    forms: &[Differential],
    tol: f64,
) -> Result<Vec<C64>, PeriodError> {
    let nv = vertices.len();
    let mut pieces = 4usize;
    let mut prev: Option<Vec<C64>> = None;
    loop {
        let mut z = Vec::new();
        let mut wdz = Vec::new();
        for k in 0..nv {
            let (a, b) = (vertices[k], vertices[(k + 1) % nv]);
            for p in 0..pieces {
                let lo = a + (b - a) * (p as f64 / pieces as f64);
                let h = (b - a) / pieces as f64;
                for &(x, w) in &GL8 {
                    z.push(lo + h * (0.5 * (x + 1.0)));
                    wdz.push(h * (0.5 * w));
                }
            }
        }
        let y = match trace_y(f, &z, y0)? {
            Some(y) => y,
            None => {
                pieces *= 2;
                if pieces > 1 << 14 {
                    return Err(PeriodError::NoConvergence { tol, change: f64::NAN, nodes: z.len() });
                }
                continue;
            }
        };
        let vals: Vec<C64> = forms
            .iter()
            .map(|&d| z.iter().zip(&wdz).zip(&y).map(|((&zz, &w), &yy)| eval_form(d, zz, yy) * w).sum())
            .collect();
        if let Some(p) = &prev {
            let change = p.iter().zip(&vals).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if change < tol {
                return Ok(vals);
            }
            if pieces > 1 << 14 {
                return Err(PeriodError::NoConvergence { tol, change, nodes: z.len() });
            }
        }
        prev = Some(vals);
        pieces *= 2;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ContourKind {
    /// Ellipse around the segment between two root indices (into the sorted roots).
    PairLoop(usize, usize),
    /// Large clockwise circle around every branch point: the class `γ∞ = −Σγ_i`.
    BigLoop,
    Polyline(Vec<C64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub clearance: f64,
}

impl ContourSpec {
    pub fn pair(i: usize, j: usize) -> Self {
        ContourSpec { kind: ContourKind::PairLoop(i, j), clearance: 1e-6 }
    }
    pub fn big() -> Self {
        ContourSpec { kind: ContourKind::BigLoop, clearance: 1e-6 }
    }
}

fn segment_distance(p: C64, q: C64, x: C64) -> f64 {
    let d = q - p;
    let t = (((x - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (x - (p + d * t)).norm()
}

/// Margin for the ellipse around `[p, q]`: 0.4 of the distance to the other
/// roots and, if `avoid_origin`, to `x = 0`.
pub fn segment_margin(roots: &[C64], p: C64, q: C64, avoid_origin: bool) -> f64 {
    let others = roots
        .iter()
        .filter(|&&r| (r - p).norm() > 1e-12 && (r - q).norm() > 1e-12)
        .map(|&r| segment_distance(p, q, r))
        .fold(f64::INFINITY, f64::min);
    let d0 = segment_distance(p, q, C64::new(0.0, 0.0));
    if avoid_origin && d0 > 1e-9 {
        0.4 * others.min(d0)
    } else {
        0.4 * others
    }
}

pub fn big_loop_radius(roots: &[C64]) -> f64 {
    2.0 * roots.iter().map(|r| r.norm()).fold(0.0, f64::max) + 1.0
}

/// `∮ differential` over the contour, on the reference sheet of `cfg`.
pub fn cycle_integral(
    f: &SpectralCoeffs,
    contour: &ContourSpec,
    differential: Differential,
    tol: f64,
) -> Result<C64, PeriodError> {
    let p = f.poly();
    let cfg = BranchConfig::from_poly(&p)?;
    Ok(cycle_integrals_with(&p, &cfg, contour, &[differential], tol)?[0])
}

pub fn cycle_integrals_with(
    p: &ComplexPoly,
    cfg: &BranchConfig,
    contour: &ContourSpec,
    forms: &[Differential],
    tol: f64,
) -> Result<Vec<C64>, PeriodError> {
    let has_pole = forms.iter().any(|d| matches!(d, Differential::YOverX2 | Differential::XPow(i32::MIN..=-1)));
    let pairs = cfg.pair_points();
    match &contour.kind {
        ContourKind::PairLoop(i, j) => {
            let (a, b) = (cfg.roots[*i], cfg.roots[*j]);
            let margin = segment_margin(&cfg.roots, a, b, true);
            let e = Ellipse::around_segment(a, b, margin);
            if has_pole {
                let d0 = e.distance_to(C64::new(0.0, 0.0));
                if segment_distance(a, b, C64::new(0.0, 0.0)) <= 1e-9 || d0 < contour.clearance {
                    return Err(PeriodError::Clearance { requested: contour.clearance, available: d0, location: C64::new(0.0, 0.0) });
                }
            }
            if margin < contour.clearance {
                return Err(PeriodError::Clearance { requested: contour.clearance, available: margin, location: (a + b) / 2.0 });
            }
            let y0 = reference_sheet(&pairs, e.point(0.0).0);
            ellipse_integrals(p, &e, y0, forms, tol)
        }
        ContourKind::BigLoop => {
            let e = Ellipse::circle(C64::new(0.0, 0.0), big_loop_radius(&cfg.roots), -1);
            let y0 = reference_sheet(&pairs, e.point(0.0).0);
            ellipse_integrals(p, &e, y0, forms, tol)
        }
        ContourKind::Polyline(v) => {
            for (k, &r) in cfg.roots.iter().chain(std::iter::once(&C64::new(0.0, 0.0))).enumerate() {
                if k == cfg.roots.len() && !has_pole {
                    break;
                }
                let d = (0..v.len()).map(|i| segment_distance(v[i], v[(i + 1) % v.len()], r)).fold(f64::INFINITY, f64::min);
                if d < contour.clearance {
                    return Err(PeriodError::Clearance { requested: contour.clearance, available: d, location: r });
                }
            }
            let y0 = reference_sheet(&pairs, v[0]);
            polyline_integrals(p, v, y0, forms, tol)
        }
    }
}

/// Forms `x^l dx/y` used for period vectors: `l = 0..=2g`, or `l = −1..=2g`
/// when the pole form is included.
pub fn period_forms(g: usize, with_pole: bool) -> Vec<Differential> {
    let lo = if with_pole { -1 } else { 0 };
    (lo..=2 * g as i32).map(Differential::XPow).collect()
}

/// Periods of `ζ₀`, the small CCW loop around `x = 0` on the sheet with
/// `y(0) = √f(0)` (principal root): only `dx/(xy)` has a residue there.
pub fn zeta_periods(p: &ComplexPoly, g: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 2 * g + 2];
    v[0] = C64::new(0.0, TAU) / p.coeff(0).sqrt();
    v
}

/// `s₀ = ±1` with `y_c(0) = s₀·√f(0)`: the clockwise big loop is
/// `−Σγ_k − s₀ζ₀` on forms with a pole at `x = 0`.
pub fn zeta_sheet_sign(p: &ComplexPoly, cfg: &BranchConfig) -> Result<i64, PeriodError> {
    let pairs = cfg.pair_points();
    let z = C64::new(1e-9, 0.0);
    let on_cut = pairs.iter().any(|&(a, b)| {
        let d = b - a;
        let t = ((-a) * d.conj()).re / d.norm_sqr();
        (0.0..=1.0).contains(&t) && (a + d * t).norm() < 1e-7
    });
    if on_cut {
        return Err(PeriodError::Clearance { requested: 1e-7, available: 0.0, location: C64::new(0.0, 0.0) });
    }
    let ratio = reference_sheet(&pairs, z) / p.eval(z).sqrt();
    Ok(if ratio.re >= 0.0 { 1 } else { -1 })
}

/// `∮_{ζ₀} y dx/x² = 2πi·f′(0)/(2√f(0))`.
pub fn zeta_y_over_x2(p: &ComplexPoly) -> C64 {
    C64::new(0.0, TAU) * p.coeff(1) / (2.0 * p.coeff(0).sqrt())
}

/// Period matrix of the basis at `cfg`: rows are cycles
/// `(γ₁..γ_{g+1}, δ₁..δ_g[, ζ₀])`, columns the forms of [`period_forms`].
pub fn basis_periods(
    p: &ComplexPoly,
    cfg: &BranchConfig,
    with_pole: bool,
    tol: f64,
    exec: Exec,
) -> Result<Vec<Vec<C64>>, PeriodError> {
    let forms = period_forms(cfg.g, with_pole);
    let ellipses = cfg.basis_ellipses();
    let rows = exec.map(&ellipses, |e| ellipse_integrals(p, e, cfg.sheet_at(e.point(0.0).0), &forms, tol));
    let mut out = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    if with_pole {
        out.push(zeta_periods(p, cfg.g));
    }
    Ok(out)
}

fn g1_coeffs(a: [f64; 3]) -> SpectralCoeffs {
    SpectralCoeffs::new(vec![a[0], a[1], a[2], 1.0])
}

/// `I₁ = (A i/2π) ∮_{γ₁} y dx/x²` on `y² = x⁴ + a₁x³ + a₂x² + a₃x + 1`, with
/// `γ₁` the loop around the conjugate pair of lowest real part.
pub fn action_i1(a: [f64; 3], big_a: f64) -> Result<f64, PeriodError> {
    let f = g1_coeffs(a);
    let p = f.poly();
    let cfg = BranchConfig::from_poly(&p)?;
    if !cfg.conjugate {
        return Err(PeriodError::NotInComponent);
    }
    let (i, j) = cfg.pairing[0];
    let v = cycle_integrals_with(&p, &cfg, &ContourSpec::pair(i, j), &[Differential::YOverX2], DEFAULT_TOL * 1e-2)?[0];
    let val = C64::new(0.0, big_a / TAU) * v;
    if val.im.abs() > 1e-9 * val.re.abs().max(1.0) {
        return Err(PeriodError::NotReal(val.im));
    }
    Ok(val.re)
}

/// `|∮_{γ∞} y dx/x² + iπa₁|` for a genus-1 curve, `γ∞` the clockwise big loop.
pub fn residue_check(a: &[f64]) -> Result<f64, PeriodError> {
    if a.len() != 4 {
        return Err(PeriodError::Genus(1));
    }
    let f = SpectralCoeffs::new(a.to_vec());
    let v = cycle_integral(&f, &ContourSpec::big(), Differential::YOverX2, DEFAULT_TOL * 1e-2)?;
    Ok((v + C64::new(0.0, PI * a[0])).norm())
}

/// The same action through the cubic
/// `g(u) = 2u³ − a₂u² + (a₁a₃/2 − 2)u + a₂ − (a₁² + a₃²)/4`:
/// `I₁ = (A/π) ∫_{u₁}^{u₂} √g(u)/(1 − u²) du` over its two roots in `[−1, 1]`.
pub fn action_i1_cubic(a: [f64; 3], big_a: f64) -> Result<f64, PeriodError> {
    let [a1, a2, a3] = a;
    let c = [a2 - (a1 * a1 + a3 * a3) / 4.0, a1 * a3 / 2.0 - 2.0, -a2, 2.0];
    let gp = ComplexPoly::from_real(&c);
    let rs = crate::poly::roots(&gp, 1e-12)?;
    let mut real: Vec<f64> = rs.iter().filter(|z| z.im.abs() < 1e-9).map(|z| z.re).filter(|u| (-1.0..=1.0).contains(u)).collect();
    real.sort_by(f64::total_cmp);
    if real.len() != 2 {
        return Err(PeriodError::NotInComponent);
    }
    let (u1, u2) = (real[0], real[1]);
    let u3 = rs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (u1 + u2);
    let h = 0.5 * (u2 - u1);
    // u = mid + h sin θ; √g = h|cos θ|·√(2(u3 − u)); the θ-integrand is 2π-periodic.
    let integrand = |th: f64| {
        let (s, c) = th.sin_cos();
        let u = mid + h * s;
        h * h * c * c * (2.0 * (u3 - u)).max(0.0).sqrt() / (1.0 - u * u)
    };
    let mut n = 64;
    let mut prev = f64::NAN;
    loop {
        let sum: f64 = (0..n).map(|k| integrand(TAU * k as f64 / n as f64)).sum::<f64>() * TAU / n as f64;
        let half = 0.5 * sum;
        if (half - prev).abs() < 1e-14 * half.abs().max(1.0) || n > 1 << 20 {
            return Ok(big_a / PI * half);
        }
        prev = half;
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pair_loop_dx_over_y_is_imaginary() {
        let f = SpectralCoeffs::new(vec![0.0, 1.0, 0.0, 1.0]);
        let cfg = BranchConfig::from_poly(&f.poly()).unwrap();
        let (i, j) = cfg.pairing[0];
        let v = cycle_integral(&f, &ContourSpec::pair(i, j), Differential::XPow(0), 1e-12).unwrap();
        assert!(v.re.abs() < 1e-10 * v.norm());
    }

    #[test]
    fn big_loop_is_minus_sum() {
        let f = SpectralCoeffs::new(vec![0.3, 1.2, 0.2, 1.0]);
        let p = f.poly();
        let cfg = BranchConfig::from_poly(&p).unwrap();
        for k in 0..=2 {
            let d = Differential::XPow(k);
            let big = cycle_integral(&f, &ContourSpec::big(), d, 1e-12).unwrap();
            let s: C64 = cfg.pairing.iter().map(|&(i, j)| cycle_integral(&f, &ContourSpec::pair(i, j), d, 1e-12).unwrap()).sum();
            assert!((big + s).norm() < 1e-8);
        }
    }

    #[test]
    fn reversing_negates() {
        let p = SpectralCoeffs::new(vec![0.3, 1.2, 0.2, 1.0]).poly();
        let cfg = BranchConfig::from_poly(&p).unwrap();
        let (i, j) = cfg.pairing[1];
        let e = Ellipse::around_segment(cfg.roots[i], cfg.roots[j], 0.2);
        let y0 = reference_sheet(&cfg.pair_points(), e.point(0.0).0);
        let fwd = ellipse_integrals(&p, &e, y0, &[Differential::XPow(1)], 1e-12).unwrap()[0];
        let bwd = ellipse_integrals(&p, &e.reversed(), y0, &[Differential::XPow(1)], 1e-12).unwrap()[0];
        assert_abs_diff_eq!((fwd + bwd).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn polyline_matches_ellipse_when_homotopic() {
        let p = SpectralCoeffs::new(vec![0.3, 1.2, 0.2, 1.0]).poly();
        let cfg = BranchConfig::from_poly(&p).unwrap();
        let (i, j) = cfg.pairing[0];
        let (a, b) = (cfg.roots[i], cfg.roots[j]);
        let m = (a + b) / 2.0;
        let h = (b - a).norm() / 2.0 + 0.2;
        let w = 0.25;
        let rect = vec![m + C64::new(w, -h), m + C64::new(w, h), m + C64::new(-w, h), m + C64::new(-w, -h)];
        let e = Ellipse::around_segment(a, b, 0.2);
        let ye = reference_sheet(&cfg.pair_points(), e.point(0.0).0);
        let yr = reference_sheet(&cfg.pair_points(), rect[0]);
        let ve = ellipse_integrals(&p, &e, ye, &[Differential::XPow(0)], 1e-12).unwrap()[0];
        let vr = polyline_integrals(&p, &rect, yr, &[Differential::XPow(0)], 1e-12).unwrap()[0];
        assert!((ve - vr).norm() < 1e-9, "{ve} vs {vr}");
    }

    #[test]
    fn residue_identity() {
        assert!(residue_check(&[0.0, 1.0, 0.0, 1.0]).unwrap() < 1e-10);
        assert!(residue_check(&[1.0, 2.0, 0.3, 1.0]).unwrap() < 1e-8);
    }

    #[test]
    fn quartic_and_cubic_actions_agree() {
        let a = [0.3, 1.2, 0.2];
        let q = action_i1(a, 1.0).unwrap();
        let c = action_i1_cubic(a, 1.0).unwrap();
        assert_abs_diff_eq!(q, c, epsilon = 1e-10);
        assert_abs_diff_eq!(c, 0.796_788_834_744_613_4, epsilon = 1e-12);
    }
}
