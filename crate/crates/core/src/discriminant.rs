//! The real discriminant locus of the genus-1 and genus-2 spectral
//! polynomials, and membership in the component without real roots.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::poly::{normalized_discriminant, real_root_count, roots, ComplexPoly, PolyError};
use crate::spectral::SpectralCoeffs;

pub const DISC_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscriminantError {
    #[error("u must be nonzero")]
    ZeroU,
    #[error("c2 must be positive, got {0}")]
    NonPositiveC2(f64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn g1_poly(a1: f64, a2: f64, c: f64) -> ComplexPoly {
    ComplexPoly::monic_from_real_tail(&[a1, a2, c, 1.0])
}

/// Point of `Δ_c` (the section `a₃ = c`) at which `u` is a double root.
pub fn delta_c_section(c: f64, u: f64) -> Result<(f64, f64), DiscriminantError> {
    if u == 0.0 {
        return Err(DiscriminantError::ZeroU);
    }
    let a1 = (c + 2.0 / u) / (u * u) - 2.0 * u;
    let a2 = -3.0 / (u * u) - 2.0 * c / u + u * u;
    Ok((a1, a2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    DoubleRootBranch,
    TripleRoot,
    TwoRealDoubleRootsCrossing,
    IsolatedComplexDoublePair,
    QuadrupleRoot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumPoint {
    /// `(a₁, a₂)`.
    pub location: Vec<f64>,
    pub kind: StratumKind,
    /// The repeated roots, each listed once.
    pub witness: Vec<C64>,
    pub normalized_disc: f64,
}

/// Distinct values among `r` whose cluster has size ≥ 2.
fn repeated_roots(r: &[C64], tol: f64) -> Vec<C64> {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &z in r {
        match clusters.iter_mut().find(|(c, _)| (*c - z).norm() < tol) {
            Some((c, n)) => {
                *c = (*c * *n as f64 + z) / (*n as f64 + 1.0);
                *n += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters.into_iter().filter(|&(_, n)| n >= 2).map(|(c, _)| c).collect()
}

fn stratum(a1: f64, a2: f64, c: f64, kind: StratumKind) -> StratumPoint {
    let p = g1_poly(a1, a2, c);
    // Multiple roots are only accurate to ~ε^{1/k}; cluster generously.
    let r = roots(&p, 1e-3).unwrap_or_default();
    let disc = normalized_discriminant(&p).map(|d| d.norm()).unwrap_or(f64::NAN);
    StratumPoint { location: vec![a1, a2], kind, witness: repeated_roots(&r, 1e-3), normalized_disc: disc }
}

/// Special points of `Δ_c` in the `(a₁, a₂)` plane.
pub fn classify_special_points(c: f64) -> Vec<StratumPoint> {
    let mut out = Vec::new();
    let crossing = stratum(-c, c * c / 4.0 - 2.0, c, StratumKind::TwoRealDoubleRootsCrossing);
    out.push(crossing);
    let other = (c, 2.0 + c * c / 4.0);
    if (c.abs() - 4.0).abs() < 1e-12 {
        out.push(stratum(other.0, other.1, c, StratumKind::QuadrupleRoot));
    } else if c.abs() < 4.0 {
        out.push(stratum(other.0, other.1, c, StratumKind::IsolatedComplexDoublePair));
    } else {
        out.push(stratum(other.0, other.1, c, StratumKind::TwoRealDoubleRootsCrossing));
        // (x−u)³(x−1/u³): u⁴ + cu + 3 = 0
        let h = ComplexPoly::from_real(&[3.0, c, 0.0, 0.0, 1.0]);
        let mut us: Vec<f64> =
            roots(&h, 1e-12).unwrap_or_default().into_iter().filter(|z| z.im.abs() < 1e-8).map(|z| z.re).collect();
        us.sort_by(f64::total_cmp);
        us.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
        for u in us {
            let v = 1.0 / (u * u * u);
            out.push(stratum(-(3.0 * u + v), 3.0 * u * u + 3.0 * u * v, c, StratumKind::TripleRoot));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationFamily {
    /// `(x²+1)² + (a₁x + a₂)x²`.
    QuarticPencil,
    /// `(x²+1)² + a x + b`.
    AffineShift,
}

impl IsolationFamily {
    pub fn poly(self, p: f64, q: f64) -> ComplexPoly {
        match self {
            IsolationFamily::QuarticPencil => ComplexPoly::monic_from_real_tail(&[p, 2.0 + q, 0.0, 1.0]),
            IsolationFamily::AffineShift => ComplexPoly::monic_from_real_tail(&[0.0, 2.0, p, 1.0 + q]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationReport {
    pub family: IsolationFamily,
    pub radius: f64,
    pub grid: usize,
    pub samples: usize,
    /// Smallest normalized discriminant over the punctured disk.
    pub min_normalized_disc: f64,
    pub min_location: (f64, f64),
    /// Samples with a negative or vanishing discriminant, or with real roots.
    pub violations: usize,
    pub origin_disc: f64,
}

impl IsolationReport {
    pub fn isolated(&self) -> bool {
        self.violations == 0 && self.min_normalized_disc > 0.0 && self.origin_disc.abs() < DISC_TOL
    }
}

/// Sample an `n × n` grid over the disk of radius `r` with the origin
/// removed: every sample should be off the discriminant and have no real roots.
pub fn a3_isolated_check(r: f64, n: usize, family: IsolationFamily, exec: Exec) -> IsolationReport {
    let step = 2.0 * r / (n as f64 - 1.0);
    let vals = exec.map_range(n * n, |k| {
        let (i, j) = (k / n, k % n);
        let (p, q) = (-r + i as f64 * step, -r + j as f64 * step);
        let rho = (p * p + q * q).sqrt();
        if rho == 0.0 || rho > r * (1.0 + 1e-12) {
            return None;
        }
        let poly = family.poly(p, q);
        let disc = normalized_discriminant(&poly).map(|d| d.re).unwrap_or(f64::NAN);
        let real = real_root_count(&poly, None).unwrap_or(usize::MAX);
        Some((p, q, disc, real))
    });
    let mut report = IsolationReport {
        family,
        radius: r,
        grid: n,
        samples: 0,
        min_normalized_disc: f64::INFINITY,
        min_location: (f64::NAN, f64::NAN),
        violations: 0,
        origin_disc: normalized_discriminant(&family.poly(0.0, 0.0)).map(|d| d.norm()).unwrap_or(f64::NAN),
    };
    for (p, q, disc, real) in vals.into_iter().flatten() {
        report.samples += 1;
        if !(disc > 0.0) || real != 0 {
            report.violations += 1;
        }
        if disc < report.min_normalized_disc {
            report.min_normalized_disc = disc;
            report.min_location = (p, q);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2BranchPoint {
    pub c2: f64,
    pub alpha: f64,
    /// `(a, b, c)`.
    pub abc: [f64; 3],
    pub c1: f64,
    pub d1: f64,
    pub d2: f64,
    /// `c₁² − 4c₂`.
    pub delta1: f64,
    /// `⅓c₂(c₂³ − 3c₂ − 10)`.
    pub delta1_closed: f64,
    /// `d₁² − 4d₂`.
    pub delta2: f64,
    /// `−4(2c₂³ + 3c₂ − 2)/(3c₂⁵)`.
    pub delta2_closed: f64,
    /// Max coefficient gap between `P` and `(x²+c₁x+c₂)²(x²+d₁x+d₂)`.
    pub factor_residual: f64,
}

/// The branch of the genus-2 discriminant in the `(a, b, c)` chart where
/// `P = (x²+1)³ + x³(ax²+bx+c)` has a double quadratic factor; `3α² = c₂(c₂+2)`.
pub fn g2_branch(c2: f64, sign: f64) -> Result<G2BranchPoint, DiscriminantError> {
    if c2 <= 0.0 {
        return Err(DiscriminantError::NonPositiveC2(c2));
    }
    let alpha = sign.signum() * (c2 * (c2 + 2.0) / 3.0).sqrt();
    let w = c2 - 1.0;
    let c2sq = c2 * c2;
    let a = 2.0 * alpha * w * (c2 * c2sq - 1.0) / (c2 * c2sq);
    let b = w * w * w * (c2 * c2sq + 3.0 * c2sq + 3.0 * c2 + 5.0) / (3.0 * c2sq);
    let c = 2.0 * alpha * w * (2.0 * c2 * c2sq + 3.0 * c2 - 5.0) / (3.0 * c2sq);
    let c1 = alpha * w;
    let d1 = -2.0 * alpha * w / (c2 * c2sq);
    let d2 = 1.0 / c2sq;
    let q = ComplexPoly::from_real(&[c2, c1, 1.0]);
    let prod = &(&q * &q) * &ComplexPoly::from_real(&[d2, d1, 1.0]);
    let p = ComplexPoly::monic_from_real_tail(&[a, 3.0 + b, c, 3.0, 0.0, 1.0]);
    Ok(G2BranchPoint {
        c2,
        alpha,
        abc: [a, b, c],
        c1,
        d1,
        d2,
        delta1: c1 * c1 - 4.0 * c2,
        delta1_closed: c2 * (c2 * c2sq - 3.0 * c2 - 10.0) / 3.0,
        delta2: d1 * d1 - 4.0 * d2,
        delta2_closed: -4.0 * (2.0 * c2 * c2sq + 3.0 * c2 - 2.0) / (3.0 * c2sq * c2sq * c2),
        factor_residual: (&p - &prod).max_abs_coeff(),
    })
}

pub fn g2_poly(abc: [f64; 3]) -> ComplexPoly {
    ComplexPoly::monic_from_real_tail(&[abc[0], 3.0 + abc[1], abc[2], 3.0, 0.0, 1.0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    pub real_roots: usize,
    pub normalized_disc: f64,
    /// `|disc|` below tolerance: too close to `Δ` to decide.
    pub ambiguous: bool,
}

pub fn component_membership(f: &SpectralCoeffs) -> Result<Membership, DiscriminantError> {
    let p = f.poly();
    let real_roots = real_root_count(&p, None)?;
    let disc = normalized_discriminant(&p)?.norm();
    let ambiguous = disc < DISC_TOL;
    Ok(Membership { inside: real_roots == 0 && !ambiguous, real_roots, normalized_disc: disc, ambiguous })
}

/// Whether `f` lies in the component of level sets where `f` has no real root.
pub fn in_component_c(f: &SpectralCoeffs) -> bool {
    component_membership(f).map(|m| m.inside).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionSample {
    pub c: f64,
    pub u: f64,
    pub a1: f64,
    pub a2: f64,
}

pub fn sample_delta_c(c: f64, us: &[f64]) -> Vec<SectionSample> {
    us.iter()
        .filter_map(|&u| delta_c_section(c, u).ok().map(|(a1, a2)| SectionSample { c, u, a1, a2 }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub c2: f64,
    pub sign: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta1: f64,
    pub delta2: f64,
}

pub fn sample_g2_branch(c2s: &[f64], sign: f64) -> Vec<BranchSample> {
    c2s.iter()
        .filter_map(|&c2| {
            g2_branch(c2, sign).ok().map(|p| BranchSample {
                c2,
                sign,
                a: p.abc[0],
                b: p.abc[1],
                c: p.abc[2],
                delta1: p.delta1,
                delta2: p.delta2,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn section_examples() {
        assert_eq!(delta_c_section(0.0, 1.0).unwrap(), (0.0, -2.0));
        assert_eq!(delta_c_section(4.0, -1.0).unwrap(), (4.0, 6.0));
        assert_eq!(delta_c_section(1.0, 0.0), Err(DiscriminantError::ZeroU));
    }

    #[test]
    fn c_zero_points() {
        let pts = classify_special_points(0.0);
        assert_eq!(pts.len(), 2);
        let iso = pts.iter().find(|p| p.kind == StratumKind::IsolatedComplexDoublePair).unwrap();
        assert_eq!(iso.location, vec![0.0, 2.0]);
        assert_eq!(iso.witness.len(), 2);
        assert!(iso.witness.iter().all(|z| (z.norm() - 1.0).abs() < 1e-6 && z.re.abs() < 1e-6));
        let cr = pts.iter().find(|p| p.kind == StratumKind::TwoRealDoubleRootsCrossing).unwrap();
        assert_eq!(cr.location, vec![0.0, -2.0]);
    }

    #[test]
    fn c_five_points() {
        let pts = classify_special_points(5.0);
        let crossings: Vec<_> = pts.iter().filter(|p| p.kind == StratumKind::TwoRealDoubleRootsCrossing).collect();
        assert_eq!(crossings.len(), 2);
        assert_eq!(crossings[0].location, vec![-5.0, 4.25]);
        assert_eq!(crossings[1].location, vec![5.0, 8.25]);
        assert_eq!(pts.iter().filter(|p| p.kind == StratumKind::TripleRoot).count(), 2);
        for p in &pts {
            assert!(p.normalized_disc < DISC_TOL, "{p:?}");
        }
    }

    #[test]
    fn quadruple() {
        for c in [4.0, -4.0] {
            let pts = classify_special_points(c);
            let q = pts.iter().find(|p| p.kind == StratumKind::QuadrupleRoot).unwrap();
            assert_eq!(q.location, vec![c, 6.0]);
        }
    }

    #[test]
    fn branch_at_one() {
        let p = g2_branch(1.0, 1.0).unwrap();
        assert_eq!(p.abc, [0.0, 0.0, 0.0]);
        assert_eq!(p.delta1_closed, -4.0);
        assert_eq!(p.delta2_closed, -4.0);
        assert_eq!(p.delta1, -4.0);
    }

    #[test]
    fn branch_sign_flip() {
        let p = g2_branch(2.0, 1.0).unwrap();
        let m = g2_branch(2.0, -1.0).unwrap();
        assert!(p.factor_residual < 1e-9);
        assert_eq!(p.abc[0], -m.abc[0]);
        assert_eq!(p.abc[1], m.abc[1]);
        assert_eq!(p.abc[2], -m.abc[2]);
        assert_abs_diff_eq!(p.delta1, p.delta1_closed, epsilon = 1e-12);
        assert_abs_diff_eq!(p.delta2, p.delta2_closed, epsilon = 1e-12);
        assert!(g2_branch(0.0, 1.0).is_err());
    }

    #[test]
    fn membership_examples() {
        assert!(in_component_c(&SpectralCoeffs::new(vec![0.0, 1.0, 0.0, 1.0])));
        let on_delta = component_membership(&SpectralCoeffs::new(vec![0.0, -2.0, 0.0, 1.0])).unwrap();
        assert!(!on_delta.inside && on_delta.ambiguous);
        assert!(in_component_c(&SpectralCoeffs::new(vec![0.01, 3.01, 0.01, 3.0, 0.0, 1.0])));
    }

    #[test]
    fn isolated_small_grid() {
        let r = a3_isolated_check(0.1, 21, IsolationFamily::QuarticPencil, Exec::Sequential);
        assert!(r.isolated(), "{r:?}");
        let r = a3_isolated_check(0.1, 21, IsolationFamily::AffineShift, Exec::Sequential);
        assert!(r.isolated(), "{r:?}");
    }
}
