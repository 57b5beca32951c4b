//! Cycle basis on `y² = f(x)`, intersection pairing and Picard–Lefschetz
//! transvections.
//!
//! Basis order is `(γ₁, …, γ_{g+1}, δ₁, …, δ_g)`, optionally extended by `ζ₀`
//! (a small loop around `x = 0`, needed for differentials with a pole there).
//! `γ_k` encircles the k-th conjugate pair counted by increasing real part and
//! `δ_j` encircles the upper roots of pairs `j` and `j+1`. All loops are CCW.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intmat::IntMatrix;
use crate::periods::{reference_sheet, segment_margin, trace_ellipse, Ellipse, PeriodError};
use crate::poly::{roots, ComplexPoly, PolyError};

/// Sign `ε₀` in `c ↦ c + ε₀·s·⟨c, δ⟩·δ`, with `s` the winding of the node.
pub const PL_SIGN: i64 = -1;

pub const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomologyError {
    #[error("expected {expected} roots, got {got}")]
    RootCount { expected: usize, got: usize },
    #[error("roots collide: minimal separation {0:e}")]
    RootCollision(f64),
    #[error("roots do not split into complex-conjugate pairs")]
    NotConjugate,
    #[error("basis mismatch: lengths {0} and {1}")]
    BasisMismatch(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchConfig {
    pub g: usize,
    /// Sorted by `(re, im)`.
    pub roots: Vec<C64>,
    /// `(lower, upper)` root indices, pairs ordered by real part of the upper root.
    pub pairing: Vec<(usize, usize)>,
    pub conjugate: bool,
    pub warning: Option<String>,
}

impl BranchConfig {
    pub fn from_poly(p: &ComplexPoly) -> Result<Self, HomologyError> {
        let n = p.degree();
        if n < 2 || n % 2 != 0 {
            return Err(HomologyError::RootCount { expected: (n.max(0) as usize + 1) & !1, got: n.max(0) as usize });
        }
        build_basis(&roots(p, 1e-10)?, n as usize / 2 - 1)
    }

    pub fn pair_points(&self) -> Vec<(C64, C64)> {
        self.pairing.iter().map(|&(i, j)| (self.roots[i], self.roots[j])).collect()
    }

    pub fn upper(&self, k: usize) -> C64 {
        self.roots[self.pairing[k].1]
    }

    pub fn min_separation(&self) -> f64 {
        min_separation(&self.roots)
    }

    /// Ellipses realizing `γ₁..γ_{g+1}, δ₁..δ_g`, kept away from `x = 0`.
    pub fn basis_ellipses(&self) -> Vec<Ellipse> {
        let mut segs: Vec<(C64, C64)> = self.pair_points();
        segs.extend((0..self.g).map(|j| (self.upper(j), self.upper(j + 1))));
        segs.into_iter().map(|(p, q)| Ellipse::around_segment(p, q, segment_margin(&self.roots, p, q, true))).collect()
    }

    /// Starting value of `y` on the reference sheet for a contour starting at `z`.
    pub fn sheet_at(&self, z: C64) -> C64 {
        reference_sheet(&self.pair_points(), z)
    }
}

pub fn min_separation(r: &[C64]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            d = d.min((r[i] - r[j]).norm());
        }
    }
    d
}

/// Canonical pairing of `2g+2` roots. Falls back to consecutive real-part
/// pairing with a warning when the roots are not conjugate pairs.
pub fn build_basis(roots_in: &[C64], g: usize) -> Result<BranchConfig, HomologyError> {
    let n = 2 * g + 2;
    if roots_in.len() != n {
        return Err(HomologyError::RootCount { expected: n, got: roots_in.len() });
    }
    let mut r = roots_in.to_vec();
    crate::poly::sort_roots(&mut r);
    let sep = min_separation(&r);
    if sep < ROOT_TOL {
        return Err(HomologyError::RootCollision(sep));
    }
    let scale = r.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut uppers: Vec<usize> = (0..n).filter(|&i| r[i].im > 1e-9 * scale).collect();
    uppers.sort_by(|&a, &b| r[a].re.total_cmp(&r[b].re).then(r[a].im.total_cmp(&r[b].im)));
    let mut used = vec![false; n];
    let mut pairing = Vec::new();
    let mut conjugate = uppers.len() == g + 1;
    if conjugate {
        for &u in &uppers {
            used[u] = true;
        }
        for &u in &uppers {
            let target = r[u].conj();
            let lo = (0..n)
                .filter(|&i| !used[i])
                .min_by(|&a, &b| (r[a] - target).norm().total_cmp(&(r[b] - target).norm()));
            match lo {
                Some(lo) if (r[lo] - target).norm() < 1e-6 * scale => {
                    used[lo] = true;
                    pairing.push((lo, u));
                }
                _ => {
                    conjugate = false;
                    break;
                }
            }
        }
    }
    if conjugate {
        return Ok(BranchConfig { g, roots: r, pairing, conjugate: true, warning: None });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| r[a].re.total_cmp(&r[b].re).then(r[a].im.total_cmp(&r[b].im)));
    let pairing = order.chunks(2).map(|c| (c[0], c[1])).collect();
    Ok(BranchConfig {
        g,
        roots: r,
        pairing,
        conjugate: false,
        warning: Some("no conjugate pairing; roots paired consecutively by real part".into()),
    })
}

pub fn require_conjugate(cfg: &BranchConfig) -> Result<(), HomologyError> {
    if cfg.conjugate {
        Ok(())
    } else {
        Err(HomologyError::NotConjugate)
    }
}

pub fn basis_labels(g: usize, with_zeta: bool) -> Vec<String> {
    let mut v: Vec<String> = (1..=g + 1).map(|k| format!("gamma{k}")).collect();
    v.extend((1..=g).map(|j| format!("delta{j}")));
    if with_zeta {
        v.push("zeta0".into());
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleClass {
    pub coeffs: Vec<i64>,
}

impl CycleClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        CycleClass { coeffs }
    }

    pub fn zero(g: usize) -> Self {
        CycleClass { coeffs: vec![0; 2 * g + 1] }
    }

    /// `γ_k`, `k = 1..=g+1`.
    pub fn gamma(g: usize, k: usize) -> Self {
        let mut c = Self::zero(g);
        c.coeffs[k - 1] = 1;
        c
    }

    /// `δ_j`, `j = 1..=g`.
    pub fn delta(g: usize, j: usize) -> Self {
        let mut c = Self::zero(g);
        c.coeffs[g + j] = 1;
        c
    }

    /// `γ∞ = −Σ γ_k`.
    pub fn gamma_inf(g: usize) -> Self {
        let mut c = Self::zero(g);
        for k in 0..=g {
            c.coeffs[k] = -1;
        }
        c
    }

    pub fn genus(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn add(&self, other: &Self) -> Self {
        CycleClass { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        CycleClass { coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn is_primitive(&self) -> bool {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        self.coeffs.iter().fold(0, |acc, &x| gcd(acc, x)) == 1
    }
}

/// Intersection matrix on `(γ₁..γ_{g+1}, δ₁..δ_g)`:
/// `⟨γ_j, δ_j⟩ = 1`, `⟨γ_{j+1}, δ_j⟩ = −1`, `⟨δ_j, δ_{j+1}⟩ = 1`.
pub fn standard_form(g: usize) -> IntMatrix {
    let n = 2 * g + 1;
    let mut j = vec![vec![0i64; n]; n];
    let mut set = |a: usize, b: usize, v: i64| {
        j[a][b] = v;
        j[b][a] = -v;
    };
    for k in 0..g {
        set(k, g + 1 + k, 1);
        set(k + 1, g + 1 + k, -1);
        if k + 1 < g {
            set(g + 1 + k, g + 2 + k, 1);
        }
    }
    j
}

/// Adds a zero row and column for `ζ₀`, which lies in the radical.
pub fn extend_with_zeta(j: &IntMatrix) -> IntMatrix {
    let n = j.len();
    let mut out: IntMatrix = j.iter().map(|r| r.iter().copied().chain(std::iter::once(0)).collect()).collect();
    out.push(vec![0; n + 1]);
    out
}

pub fn form_value(j: &IntMatrix, a: &[i64], b: &[i64]) -> i64 {
    (0..a.len()).map(|r| (0..b.len()).map(|c| a[r] * j[r][c] * b[c]).sum::<i64>()).sum()
}

pub fn intersection(c1: &CycleClass, c2: &CycleClass) -> Result<i64, HomologyError> {
    if c1.coeffs.len() != c2.coeffs.len() || c1.coeffs.len() % 2 == 0 {
        return Err(HomologyError::BasisMismatch(c1.coeffs.len(), c2.coeffs.len()));
    }
    Ok(form_value(&standard_form(c1.genus()), &c1.coeffs, &c2.coeffs))
}

/// Transvection along `vanishing` for a loop winding `s` times around the node.
pub fn picard_lefschetz_with(j: &IntMatrix, c: &[i64], vanishing: &[i64], s: i64) -> Vec<i64> {
    let k = PL_SIGN * s * form_value(j, c, vanishing);
    c.iter().zip(vanishing).map(|(a, d)| a + k * d).collect()
}

/// One positive turn around the node of `vanishing`.
pub fn picard_lefschetz(c: &CycleClass, vanishing: &CycleClass) -> Result<CycleClass, HomologyError> {
    picard_lefschetz_turns(c, vanishing, 1)
}

pub fn picard_lefschetz_turns(c: &CycleClass, vanishing: &CycleClass, s: i64) -> Result<CycleClass, HomologyError> {
    if c.coeffs.len() != vanishing.coeffs.len() {
        return Err(HomologyError::BasisMismatch(c.coeffs.len(), vanishing.coeffs.len()));
    }
    let j = standard_form(c.genus());
    Ok(CycleClass::new(picard_lefschetz_with(&j, &c.coeffs, &vanishing.coeffs, s)))
}

/// Matrix (columns = images of basis vectors) of a transvection.
pub fn transvection_matrix(j: &IntMatrix, vanishing: &[i64], s: i64) -> IntMatrix {
    let n = vanishing.len();
    let cols: Vec<Vec<i64>> = (0..n)
        .map(|q| {
            let e: Vec<i64> = (0..n).map(|i| i64::from(i == q)).collect();
            picard_lefschetz_with(j, &e, vanishing, s)
        })
        .collect();
    crate::intmat::transpose(&cols)
}

fn crossings(a: &[C64], ya: &[C64], b: &[C64], yb: &[C64]) -> i64 {
    let (na, nb) = (a.len(), b.len());
    let mut total = 0;
    for i in 0..na {
        let p = a[i];
        let r = a[(i + 1) % na] - p;
        for k in 0..nb {
            let q = b[k];
            let s = b[(k + 1) % nb] - q;
            let den = (r.conj() * s).im;
            if den == 0.0 {
                continue;
            }
            let qp = q - p;
            let t = (qp.conj() * s).im / den;
            let u = (qp.conj() * r).im / den;
            if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u) {
                let y1 = ya[i] + (ya[(i + 1) % na] - ya[i]) * t;
                let y2 = yb[k] + (yb[(k + 1) % nb] - yb[k]) * u;
                if (y1 - y2).norm() < (y1 + y2).norm() {
                    total += den.signum() as i64;
                }
            }
        }
    }
    total
}

/// Intersection matrix of the basis contours, read off from signed crossings
/// of their lifts (crossings on opposite sheets do not count).
pub fn geometric_form(p: &ComplexPoly, cfg: &BranchConfig) -> Result<IntMatrix, PeriodError> {
    let traced = cfg
        .basis_ellipses()
        .iter()
        .map(|e| trace_ellipse(p, e, cfg.sheet_at(e.point(0.0).0), 800))
        .collect::<Result<Vec<_>, _>>()?;
    let n = traced.len();
    let mut j = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                j[a][b] = crossings(&traced[a].z, &traced[a].y, &traced[b].z, &traced[b].y);
            }
        }
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: &[f64]) -> (ComplexPoly, BranchConfig) {
        let p = ComplexPoly::monic_from_real_tail(a);
        let c = BranchConfig::from_poly(&p).unwrap();
        (p, c)
    }

    #[test]
    fn pairing_of_x4_x2_1() {
        let (_, c) = cfg(&[0.0, 1.0, 0.0, 1.0]);
        assert!(c.conjugate);
        let u0 = c.upper(0);
        let u1 = c.upper(1);
        assert!((u0 - C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)).norm() < 1e-10);
        assert!((u1 - C64::from_polar(1.0, std::f64::consts::PI / 3.0)).norm() < 1e-10);
    }

    #[test]
    fn real_roots_fall_back() {
        let r: Vec<C64> = [-2.0, -1.0, 1.0, 3.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        let c = build_basis(&r, 1).unwrap();
        assert!(!c.conjugate);
        assert!(c.warning.is_some());
        assert_eq!(c.pairing, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn collision_rejected() {
        let r = vec![C64::new(0.0, 1.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(1.0, 0.0)];
        assert!(matches!(build_basis(&r, 1), Err(HomologyError::RootCollision(_))));
    }

    #[test]
    fn geometric_form_matches_standard() {
        let (p, c) = cfg(&[0.3, 1.2, 0.2, 1.0]);
        assert_eq!(geometric_form(&p, &c).unwrap(), standard_form(1));
        let (p, c) = cfg(&[0.03, 3.01, -0.02, 3.0, 0.0, 1.0]);
        assert_eq!(geometric_form(&p, &c).unwrap(), standard_form(2));
    }

    #[test]
    fn symplectic_part_unimodular() {
        for g in 1..=4 {
            let j = standard_form(g);
            let idx: Vec<usize> = (0..g).chain(g + 1..2 * g + 1).collect();
            let sub: IntMatrix = idx.iter().map(|&r| idx.iter().map(|&c| j[r][c]).collect()).collect();
            assert_eq!(crate::intmat::det(&sub).abs(), 1);
        }
    }

    #[test]
    fn basic_pairings() {
        let g = 1;
        assert_eq!(intersection(&CycleClass::gamma(g, 1), &CycleClass::delta(g, 1)).unwrap(), 1);
        assert_eq!(intersection(&CycleClass::gamma(g, 1), &CycleClass::gamma(g, 2)).unwrap(), 0);
        let c = CycleClass::new(vec![3, -1, 2]);
        assert_eq!(intersection(&c, &c).unwrap(), 0);
    }

    #[test]
    fn two_vanishing_cycles_send_gamma1_to_gamma1_plus_gamma_inf() {
        let g = 1;
        let c = picard_lefschetz_turns(&CycleClass::gamma(g, 1), &CycleClass::delta(g, 1), 1).unwrap();
        let c = picard_lefschetz_turns(&c, &CycleClass::new(vec![1, 1, -1]), -1).unwrap();
        assert_eq!(c, CycleClass::gamma(g, 1).add(&CycleClass::gamma_inf(g)));
        assert_eq!(c.coeffs, vec![0, -1, 0]);
    }

    #[test]
    fn orthogonal_unchanged() {
        let c = CycleClass::gamma(1, 1);
        assert_eq!(picard_lefschetz(&c, &CycleClass::gamma(1, 2)).unwrap(), c);
    }
}
