//! Continuation of roots and period vectors along loops in coefficient space,
//! and the resulting integer monodromy matrices.
//!
//! Matrices act on columns: column `j` holds the image of basis element `j`.
//! Loops compose on the right, `M(ℓ₁·ℓ₂) = M(ℓ₂)·M(ℓ₁)`.

mod gauss_manin;
mod loops;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gauss_manin::gauss_manin_matrix;
pub use loops::{
    branch_loop, cushman_loop, kappa_loop, named_loop, named_loop_at, Chart, Kernel, ParameterLoop, Segment,
    CUSHMAN_BASE, KAPPA_BASE, KAPPA_RADIUS,
};

use crate::exec::Exec;
use crate::homology::{
    basis_labels, extend_with_zeta, min_separation, standard_form, transvection_matrix, BranchConfig, HomologyError,
};
use crate::intmat::{self, IntMatrix};
use crate::periods::{basis_periods, ellipse_integrals, period_forms, zeta_sheet_sign, Ellipse, PeriodError};
use crate::poly::{roots, ComplexPoly, PolyError};

pub const ROUNDING_THRESHOLD: f64 = 0.1;
pub const TRANSPORT_TOL: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackingError {
    #[error("loop approaches the discriminant on segment {segment} near t = {t:.6} (root separation {separation:e})")]
    NearDiscriminant { segment: usize, t: f64, separation: f64 },
    #[error("loop is not closed")]
    NotClosed,
    #[error("root paths do not close (mismatch {0:e})")]
    RootsNotClosed(f64),
    #[error("rounding residual {0:e} exceeds threshold; refine the transport tolerance")]
    Residual(f64),
    #[error("period matrix is singular")]
    SingularPeriods,
    #[error("Gauss–Manin system is singular at the current point")]
    SingularConnection,
    #[error("base point is not in the no-real-root component")]
    BaseNotInComponent,
    #[error("loop has no identified discriminant kernel")]
    NoKernel,
    #[error("ambiguous vanishing-cycle identification (residual {0:e})")]
    Ambiguous(f64),
    #[error("image of the action cycles leaves their span")]
    NotInSpan,
    #[error("genus {0} not supported here")]
    Genus(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Periods(#[from] PeriodError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub name: String,
    pub basis: Vec<String>,
    pub matrix: IntMatrix,
    pub residual: f64,
    pub permutation: Vec<usize>,
    pub orientation: i32,
    pub steps_used: usize,
    pub condition: f64,
}

impl MonodromyResult {
    pub fn det(&self) -> i64 {
        intmat::det(&self.matrix)
    }
}

#[derive(Clone, Debug)]
pub struct RootPaths {
    /// `paths[k]` follows the k-th root of the starting (sorted) root list.
    pub paths: Vec<Vec<C64>>,
    pub params: Vec<f64>,
    /// `permutation[k]` is the index of the starting root where root k ends.
    pub permutation: Vec<usize>,
}

fn poly_at(a: &[f64]) -> ComplexPoly {
    ComplexPoly::monic_from_real_tail(a)
}

fn sorted_roots(a: &[f64]) -> Result<Vec<C64>, PolyError> {
    let mut r = roots(&poly_at(a), 1e-11)?;
    crate::poly::sort_roots(&mut r);
    Ok(r)
}

/// Greedy nearest matching of `new` onto `cur`; `None` if some root would
/// move by more than `limit`.
fn match_roots(cur: &[C64], new: &[C64], limit: f64) -> Option<Vec<C64>> {
    let mut used = vec![false; new.len()];
    let mut out = Vec::with_capacity(cur.len());
    for &c in cur {
        let (b, d) = new
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, &z)| (i, (z - c).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        if d >= limit {
            return None;
        }
        used[b] = true;
        out.push(new[b]);
    }
    Some(out)
}

/// Follow the roots along the loop, bisecting any step in which a root moves
/// by a third of the current minimal separation or more.
pub fn track_roots(lp: &ParameterLoop, steps: usize) -> Result<RootPaths, TrackingError> {
    if !lp.is_closed() {
        return Err(TrackingError::NotClosed);
    }
    let steps = steps.max(8);
    let nseg = lp.segments.len();
    let start = sorted_roots(&lp.point(0.0))?;
    let mut cur = start.clone();
    let mut paths: Vec<Vec<C64>> = cur.iter().map(|&z| vec![z]).collect();
    let mut params = vec![0.0];
    let mut t = 0.0;
    let mut h = 1.0 / steps as f64;
    let sep_floor = 1e-7;
    while t < 1.0 {
        let tn = (t + h).min(1.0);
        let new = sorted_roots(&lp.point(tn))?;
        let sep = min_separation(&cur).min(min_separation(&new));
        if sep < sep_floor {
            let x = t * nseg as f64;
            return Err(TrackingError::NearDiscriminant { segment: x.floor() as usize, t: x.fract(), separation: sep });
        }
        match match_roots(&cur, &new, sep / 3.0) {
            Some(m) => {
                cur = m;
                for (p, &z) in paths.iter_mut().zip(&cur) {
                    p.push(z);
                }
                params.push(tn);
                t = tn;
                h = (h * 1.5).min(1.0 / steps as f64);
            }
            None => {
                h /= 2.0;
                if h < 1e-12 {
                    let x = t * nseg as f64;
                    return Err(TrackingError::NearDiscriminant { segment: x.floor() as usize, t: x.fract(), separation: sep });
                }
            }
        }
    }
    let mut permutation = Vec::with_capacity(cur.len());
    let mut worst: f64 = 0.0;
    for &z in &cur {
        let (i, d) = start
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, (s - z).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        worst = worst.max(d);
        permutation.push(i);
    }
    let scale = start.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if worst > 1e-9 * scale {
        return Err(TrackingError::RootsNotClosed(worst));
    }
    Ok(RootPaths { paths, params, permutation })
}

fn rk4(path: &dyn Fn(f64) -> (Vec<C64>, Vec<C64>), with_pole: bool, s: f64, h: f64, phi: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let f = |s: f64, p: &DMatrix<C64>| -> Option<DMatrix<C64>> {
        let (a, da) = path(s);
        Some(gauss_manin_matrix(&a, &da, with_pole)? * p)
    };
    let k1 = f(s, phi)?;
    let k2 = f(s + h / 2.0, &(phi + &k1 * C64::new(h / 2.0, 0.0)))?;
    let k3 = f(s + h / 2.0, &(phi + &k2 * C64::new(h / 2.0, 0.0)))?;
    let k4 = f(s + h, &(phi + &k3 * C64::new(h, 0.0)))?;
    Some(phi + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0))
}

/// Fundamental matrix of the Gauss–Manin system along `path` (local
/// parameter in `[0, 1]`), by RK4 with step doubling (local error per step below `tol`). Returns the matrix and
/// the number of accepted steps.
pub fn transport(
    path: &dyn Fn(f64) -> (Vec<C64>, Vec<C64>),
    with_pole: bool,
    tol: f64,
) -> Result<(DMatrix<C64>, usize), TrackingError> {
    let n = path(0.0).0.len() + usize::from(with_pole) - 1;
    let mut phi = DMatrix::<C64>::identity(n, n);
    let mut s = 0.0;
    let mut h: f64 = 1.0 / 32.0;
    let mut steps = 0;
    while s < 1.0 {
        h = h.min(1.0 - s);
        let full = rk4(path, with_pole, s, h, &phi).ok_or(TrackingError::SingularConnection)?;
        let half = rk4(path, with_pole, s, h / 2.0, &phi).ok_or(TrackingError::SingularConnection)?;
        let two = rk4(path, with_pole, s + h / 2.0, h / 2.0, &half).ok_or(TrackingError::SingularConnection)?;
        let scale = two.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let err = (&two - &full).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        if err <= tol || h < 1e-12 {
            phi = &two + (&two - &full) * C64::new(1.0 / 15.0, 0.0);
            s += h;
            steps += 1;
            let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 2.0 };
            h *= grow.clamp(0.3, 2.0);
        } else {
            h *= (0.9 * (tol / err).powf(0.2)).clamp(0.1, 0.5);
        }
    }
    Ok((phi, steps))
}

pub fn transport_loop(lp: &ParameterLoop, with_pole: bool, tol: f64) -> Result<(DMatrix<C64>, usize), TrackingError> {
    let n = 2 * lp.genus() + 1 + usize::from(with_pole);
    let mut phi = DMatrix::<C64>::identity(n, n);
    let mut steps = 0;
    for piece in lp.pieces() {
        let (p, k) = transport(&*piece, with_pole, tol)?;
        phi = p * phi;
        steps += k;
    }
    Ok((phi, steps))
}

fn to_dmatrix(rows: &[Vec<C64>]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

/// Frobenius-norm condition number `‖B‖·‖B⁻¹‖`.
fn condition(b: &DMatrix<C64>) -> f64 {
    match b.clone().try_inverse() {
        Some(inv) => b.norm() * inv.norm(),
        None => f64::INFINITY,
    }
}

/// Integer matrix `M` (columns = images) with transported basis periods
/// `B Φᵀ = Mᵀ B`, and its rounding residual.
pub fn identify(phi: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<(IntMatrix, f64), TrackingError> {
    let binv = b.clone().try_inverse().ok_or(TrackingError::SingularPeriods)?;
    let e = b * phi.transpose();
    let mt = e * binv;
    let n = mt.nrows();
    let mut residual: f64 = 0.0;
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let z = mt[(j, i)];
            let r = z.re.round();
            residual = residual.max((z - C64::new(r, 0.0)).norm());
            m[i][j] = r as i64;
        }
    }
    Ok((m, residual))
}

struct BaseData {
    periods: DMatrix<C64>,
}

fn base_data(lp: &ParameterLoop, with_pole: bool, exec: Exec) -> Result<BaseData, TrackingError> {
    let a = lp.point(0.0);
    let p = poly_at(&a);
    let cfg = BranchConfig::from_poly(&p)?;
    if !cfg.conjugate {
        return Err(TrackingError::BaseNotInComponent);
    }
    let rows = basis_periods(&p, &cfg, with_pole, 1e-12, exec)?;
    Ok(BaseData { periods: to_dmatrix(&rows) })
}

fn loop_name(lp: &ParameterLoop) -> String {
    lp.name.clone().unwrap_or_else(|| "custom".into())
}

fn monodromy_impl(lp: &ParameterLoop, with_pole: bool, tol: f64, exec: Exec) -> Result<MonodromyResult, TrackingError> {
    let g = lp.genus();
    let base = base_data(lp, with_pole, exec)?;
    let rp = track_roots(lp, 64)?;
    let (phi, steps) = transport_loop(lp, with_pole, tol)?;
    let (matrix, residual) = identify(&phi, &base.periods)?;
    if residual > ROUNDING_THRESHOLD {
        return Err(TrackingError::Residual(residual));
    }
    Ok(MonodromyResult {
        name: loop_name(lp),
        basis: basis_labels(g, with_pole),
        matrix,
        residual,
        permutation: rp.permutation,
        orientation: lp.orientation,
        steps_used: steps + rp.params.len(),
        condition: condition(&base.periods),
    })
}

/// Monodromy on `(γ₁..γ_{g+1}, δ₁..δ_g)` from continuation of the periods of
/// `x^l dx/y`, `l = 0..2g`.
pub fn monodromy_periods(lp: &ParameterLoop) -> Result<MonodromyResult, TrackingError> {
    monodromy_impl(lp, false, TRANSPORT_TOL, Exec::default())
}

/// As [`monodromy_periods`] on the lattice extended by `ζ₀`.
pub fn monodromy_periods_extended(lp: &ParameterLoop) -> Result<MonodromyResult, TrackingError> {
    monodromy_impl(lp, true, TRANSPORT_TOL, Exec::default())
}

pub fn monodromy_with(lp: &ParameterLoop, extended: bool, tol: f64, exec: Exec) -> Result<MonodromyResult, TrackingError> {
    monodromy_impl(lp, extended, tol, exec)
}

/// Independent loops, processed according to `exec`.
pub fn monodromy_batch(loops: &[ParameterLoop], exec: Exec) -> Vec<Result<MonodromyResult, TrackingError>> {
    exec.map(loops, |lp| monodromy_impl(lp, false, TRANSPORT_TOL, Exec::Sequential))
}

/// Rewrite `m` (columns = images) in the basis whose vectors are the columns
/// of `p` (integer, expressed in the old basis). Fails if the images leave
/// the span of `p`.
pub fn change_basis(m: &IntMatrix, p: &IntMatrix, rows: &[usize]) -> Result<IntMatrix, TrackingError> {
    let mp = intmat::matmul(m, p);
    let sub: IntMatrix = rows.iter().map(|&r| p[r].clone()).collect();
    let inv = intmat::inverse_unimodular(&sub).ok_or(TrackingError::NotInSpan)?;
    let mp_sub: IntMatrix = rows.iter().map(|&r| mp[r].clone()).collect();
    let x = intmat::matmul(&inv, &mp_sub);
    if intmat::matmul(p, &x) != mp {
        return Err(TrackingError::NotInSpan);
    }
    Ok(x)
}

/// Genus-1 monodromy on the actions `(I₁, I₂, I₃)`, realized by the cycles
/// `(γ₁, γ∞, −ζ₀)` paired with `(A i/2π)·y dx/x²`. On the extended lattice
/// the big loop is `γ∞ = −γ₁ − γ₂ − s₀ζ₀`.
pub fn monodromy_actions_g1(lp: &ParameterLoop) -> Result<MonodromyResult, TrackingError> {
    monodromy_actions_g1_with(lp, TRANSPORT_TOL, Exec::default())
}

pub fn monodromy_actions_g1_with(lp: &ParameterLoop, tol: f64, exec: Exec) -> Result<MonodromyResult, TrackingError> {
    if lp.genus() != 1 {
        return Err(TrackingError::Genus(lp.genus()));
    }
    let a = lp.point(0.0);
    let p = poly_at(&a);
    let cfg = BranchConfig::from_poly(&p)?;
    let s0 = zeta_sheet_sign(&p, &cfg)?;
    let ext = monodromy_impl(lp, true, tol, exec)?;
    let basis = vec![vec![1, -1, 0], vec![0, -1, 0], vec![0, 0, 0], vec![0, -s0, -1]];
    let matrix = change_basis(&ext.matrix, &basis, &[0, 1, 3])?;
    Ok(MonodromyResult { basis: vec!["I1".into(), "I2".into(), "I3".into()], matrix, ..ext })
}

/// Genus-2 monodromy restricted to `(γ₁, γ₃, γ∞)`; `labels[k]` is the index of
/// our pair cycle that plays the role of the k-th `γ`.
pub fn gamma_sub_basis_g2(m: &IntMatrix, labels: [usize; 3]) -> Result<IntMatrix, TrackingError> {
    let n = m.len();
    let mut p = vec![vec![0i64; 3]; n];
    p[labels[0]][0] = 1;
    p[labels[2]][1] = 1;
    for k in 0..3 {
        p[k][2] = -1;
    }
    change_basis(m, &p, &[labels[0], labels[2], labels[1]])
}

fn unwrap_angle(prev: C64, next: C64) -> f64 {
    (next / prev).arg()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingData {
    pub roots: (usize, usize),
    pub winding: i64,
    pub class: Vec<i64>,
    pub residual: f64,
}

/// Monodromy from the vanishing cycles of the loop's kernel: shrink the
/// circle toward its center, find the colliding root pairs, identify their
/// vanishing classes at the base point and compose the transvections.
pub fn picard_lefschetz_route(lp: &ParameterLoop) -> Result<MonodromyResult, TrackingError> {
    picard_lefschetz_route_with(lp, false).map(|(r, _)| r)
}

pub fn picard_lefschetz_route_with(
    lp: &ParameterLoop,
    with_pole: bool,
) -> Result<(MonodromyResult, Vec<VanishingData>), TrackingError> {
    let kernel = lp.kernel.as_ref().ok_or(TrackingError::NoKernel)?;
    let chart = lp.chart;
    let g = lp.genus();
    let lam = 0.02;
    let base_pt = lp.base();
    let start = kernel.start();
    let near: Vec<f64> = kernel.center.iter().zip(&start).map(|(c, s)| c + lam * (s - c)).collect();

    let a_near = chart.lift(&near);
    let r = sorted_roots(&a_near)?;
    let n = r.len();
    let dmin = min_separation(&r);
    let close: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| (r[i] - r[j]).norm() < 3.0 * dmin).collect();

    let shrunk = ParameterLoop::lasso(
        chart,
        near.clone(),
        Kernel { radius: kernel.radius * lam, ..kernel.clone() },
        lp.orientation,
        None,
    );
    let mut cur = r.clone();
    let mut angle = vec![0.0; close.len()];
    let k_steps = 2000;
    for k in 1..=k_steps {
        // the middle third of the shrunk lasso is its circle
        let t = (1.0 + k as f64 / k_steps as f64) / 3.0;
        let t = if k == k_steps { 2.0 / 3.0 - 1e-15 } else { t };
        let new = sorted_roots(&shrunk.point(t))?;
        let sep = min_separation(&cur);
        let m = match_roots(&cur, &new, sep / 2.0).ok_or(TrackingError::Ambiguous(sep))?;
        for (q, &(i, j)) in close.iter().enumerate() {
            angle[q] += unwrap_angle(cur[i] - cur[j], m[i] - m[j]);
        }
        cur = m;
    }

    let base = base_data(lp, with_pole, Exec::default())?;
    let near_to_start: Box<dyn Fn(f64) -> (Vec<C64>, Vec<C64>) + Send + Sync> = {
        let seg = Segment::Line { from: near.clone(), to: start.clone() };
        Box::new(move |t| lift_seg(chart, &seg, t))
    };
    let start_to_base: Box<dyn Fn(f64) -> (Vec<C64>, Vec<C64>) + Send + Sync> = {
        let seg = Segment::Line { from: start.clone(), to: base_pt.clone() };
        Box::new(move |t| lift_seg(chart, &seg, t))
    };
    let (p1, s1) = transport(&*near_to_start, with_pole, TRANSPORT_TOL)?;
    let (p2, s2) = transport(&*start_to_base, with_pole, TRANSPORT_TOL)?;
    let phi = p2 * p1;

    let bt_lu = base.periods.transpose().lu();
    let pnear = poly_at(&a_near);
    let forms = period_forms(g, with_pole);
    let j = if with_pole { extend_with_zeta(&standard_form(g)) } else { standard_form(g) };
    let mut matrix = intmat::identity(j.len());
    let mut data = Vec::new();
    let mut worst: f64 = 0.0;
    for (q, &(ia, ib)) in close.iter().enumerate() {
        let (a, b) = (r[ia], r[ib]);
        let mid = (a + b) / 2.0;
        let others = r
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != ia && *k != ib)
            .map(|(_, &z)| (z - mid).norm())
            .chain(std::iter::once(mid.norm()))
            .fold(f64::INFINITY, f64::min);
        let margin = (0.3 * others).min((a - b).norm());
        let e = Ellipse::around_segment(a, b, margin);
        let z0 = e.point(0.0).0;
        let pi = ellipse_integrals(&pnear, &e, pnear.eval(z0).sqrt(), &forms, 1e-12)?;
        let pb = &phi * nalgebra::DVector::from_vec(pi);
        let coeffs = bt_lu.solve(&pb).ok_or(TrackingError::SingularPeriods)?;
        let class: Vec<i64> = coeffs.iter().map(|z| z.re.round() as i64).collect();
        let res = coeffs.iter().zip(&class).map(|(z, &c)| (z - C64::new(c as f64, 0.0)).norm()).fold(0.0, f64::max);
        worst = worst.max(res);
        let winding = (angle[q] / PI).round() as i64;
        matrix = intmat::matmul(&transvection_matrix(&j, &class, winding), &matrix);
        data.push(VanishingData { roots: (ia, ib), winding, class, residual: res });
    }
    if worst > ROUNDING_THRESHOLD {
        return Err(TrackingError::Ambiguous(worst));
    }
    let rp = track_roots(lp, 64)?;
    Ok((
        MonodromyResult {
            name: loop_name(lp),
            basis: basis_labels(g, with_pole),
            matrix,
            residual: worst,
            permutation: rp.permutation,
            orientation: lp.orientation,
            steps_used: s1 + s2 + k_steps,
            condition: condition(&base.periods),
        },
        data,
    ))
}

fn lift_seg(chart: Chart, seg: &Segment, t: f64) -> (Vec<C64>, Vec<C64>) {
    let (p, d) = seg.eval(t, false);
    let c = |x: Vec<f64>| x.into_iter().map(|v| C64::new(v, 0.0)).collect::<Vec<_>>();
    (c(chart.lift(&p)), c(chart.lift_velocity(&d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_loop() -> ParameterLoop {
        let b = vec![0.3, 1.2, 0.2];
        ParameterLoop::polyline(Chart::G1Reduced, &[b.clone(), b.clone()], 1, Some("trivial".into()))
    }

    #[test]
    fn trivial_loop_gives_identity() {
        let r = monodromy_periods(&constant_loop()).unwrap();
        assert_eq!(r.matrix, intmat::identity(3));
        assert!(r.residual < 1e-10);
        assert_eq!(r.permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn change_basis_round_trip() {
        let m = vec![vec![0, 1, 0], vec![-1, 2, 0], vec![0, 0, 1]];
        let id = intmat::identity(3);
        assert_eq!(change_basis(&m, &id, &[0, 1, 2]).unwrap(), m);
    }
}
