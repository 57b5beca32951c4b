//! Gauss–Manin connection on the period vector `Π_l = ∮ x^l dx/y`.
//!
//! `∂_s (x^l/y) = −½ x^l ḟ / y³`; the numerator is reduced to `(A + 2B′)/y`
//! with `Af + Bf′ = Q`, then high and low powers are removed with the exact
//! forms `d(x^k y) = (k x^{k−1} f + ½ x^k f′)/y`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64 as C64;

type Laurent = BTreeMap<i32, C64>;

fn add_poly(out: &mut Laurent, shift: i32, c: &[C64], s: C64) {
    for (k, &v) in c.iter().enumerate() {
        *out.entry(k as i32 + shift).or_default() += s * v;
    }
}

fn deriv(c: &[C64]) -> Vec<C64> {
    c.iter().enumerate().skip(1).map(|(k, &v)| v * k as f64).collect()
}

struct Reducer {
    n: usize,
    g: usize,
    c: Vec<C64>,
    fp: Vec<C64>,
    lu: LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Reducer {
    /// `c` ascending coefficients of the monic `f`, degree `n = 2g+2`.
    fn new(c: Vec<C64>) -> Self {
        let n = c.len() - 1;
        let fp = deriv(&c);
        let size = 2 * n - 1;
        let mut m = DMatrix::<C64>::zeros(size, size);
        for i in 0..n - 1 {
            for (k, &v) in c.iter().enumerate() {
                m[(i + k, i)] += v;
            }
        }
        for i in 0..n {
            for (k, &v) in fp.iter().enumerate() {
                m[(i + k, n - 1 + i)] += v;
            }
        }
        Reducer { n, g: n / 2 - 1, c, fp, lu: m.lu() }
    }

    /// `(A, B)` with `A f + B f′ = q`.
    fn bezout(&self, q: &[C64]) -> Option<(Vec<C64>, Vec<C64>)> {
        let size = 2 * self.n - 1;
        let mut rhs = DVector::<C64>::zeros(size);
        for (k, &v) in q.iter().enumerate() {
            rhs[k] = v;
        }
        let s = self.lu.solve(&rhs)?;
        let s: Vec<C64> = s.iter().copied().collect();
        Some((s[..self.n - 1].to_vec(), s[self.n - 1..].to_vec()))
    }

    /// Numerator over `y³` (lowest power −1) to numerator over `y`.
    fn reduce_y3(&self, q: &Laurent) -> Option<Laurent> {
        let mut out = Laurent::new();
        let mut qp = vec![C64::default(); 2 * self.n - 1];
        let mut qm = C64::default();
        for (&k, &v) in q {
            match k {
                -1 => qm += v,
                k if k >= 0 => qp[k as usize] += v,
                _ => return None,
            }
        }
        let one = C64::new(1.0, 0.0);
        let (a, b) = self.bezout(&qp)?;
        add_poly(&mut out, 0, &a, one);
        add_poly(&mut out, 0, &deriv(&b), C64::new(2.0, 0.0));
        if qm != C64::default() {
            let mut unit = vec![C64::default(); 2 * self.n - 1];
            unit[0] = one;
            let (a, b) = self.bezout(&unit)?;
            add_poly(&mut out, -1, &a, qm);
            add_poly(&mut out, -1, &deriv(&b), 2.0 * qm);
            add_poly(&mut out, -2, &b, -2.0 * qm);
        }
        Some(out)
    }

    fn exact_form(&self, k: i32) -> Laurent {
        let mut ex = Laurent::new();
        add_poly(&mut ex, k - 1, &self.c, C64::new(k as f64, 0.0));
        add_poly(&mut ex, k, &self.fp, C64::new(0.5, 0.0));
        ex
    }

    fn cancel(&self, r: &mut Laurent, m: i32, k: i32) {
        let ex = self.exact_form(k);
        let coef = r[&m] / ex[&m];
        for (&p, &v) in &ex {
            *r.entry(p).or_default() -= coef * v;
        }
        r.remove(&m);
    }

    /// Coordinates over `x^l dx/y`, `l = lo..=2g`.
    fn reduce_y(&self, mut r: Laurent, lo: i32) -> Vec<C64> {
        let top = 2 * self.g as i32;
        let nonzero = |r: &Laurent, k: i32| r.get(&k).is_some_and(|v| v.norm() > 0.0);
        while let Some(m) = r.keys().copied().filter(|&k| k < -1 && nonzero(&r, k)).min() {
            self.cancel(&mut r, m, m + 1);
        }
        while let Some(m) = r.keys().copied().filter(|&k| k > top && nonzero(&r, k)).max() {
            self.cancel(&mut r, m, m - (self.n as i32 - 1));
        }
        (lo..=top).map(|l| r.get(&l).copied().unwrap_or_default()).collect()
    }
}

/// `G` with `dΠ/ds = G Π`, for `f` with monic tail `a` moving with velocity `da`.
pub fn gauss_manin_matrix(a: &[C64], da: &[C64], with_pole: bool) -> Option<DMatrix<C64>> {
    let n = a.len();
    let mut c = vec![C64::new(1.0, 0.0); n + 1];
    for j in 1..=n {
        c[n - j] = a[j - 1];
    }
    let red = Reducer::new(c);
    let lo = if with_pole { -1 } else { 0 };
    let top = 2 * red.g as i32;
    let dim = (top - lo + 1) as usize;
    let mut gm = DMatrix::<C64>::zeros(dim, dim);
    for (row, l) in (lo..=top).enumerate() {
        let mut q = Laurent::new();
        for j in 1..=n {
            if da[j - 1] != C64::default() {
                *q.entry(l + (n - j) as i32).or_default() += -0.5 * da[j - 1];
            }
        }
        let r = red.reduce_y3(&q)?;
        for (col, v) in red.reduce_y(r, lo).into_iter().enumerate() {
            gm[(row, col)] = v;
        }
    }
    Some(gm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::BranchConfig;
    use crate::periods::{ellipse_integrals, period_forms};
    use crate::poly::ComplexPoly;

    /// Finite-difference check of the connection on one contour.
    #[test]
    fn matches_finite_difference() {
        let a = [0.3, 1.2, 0.2, 1.0];
        let da = [0.1, -0.2, 0.05, 0.3];
        let forms = period_forms(1, true);
        let periods = |t: f64| {
            let coeffs: Vec<f64> = a.iter().zip(&da).map(|(x, d)| x + t * d).collect();
            let p = ComplexPoly::monic_from_real_tail(&coeffs);
            let cfg = BranchConfig::from_poly(&p).unwrap();
            let e = cfg.basis_ellipses()[2];
            ellipse_integrals(&p, &e, cfg.sheet_at(e.point(0.0).0), &forms, 1e-13).unwrap()
        };
        let ac: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
        let dc: Vec<C64> = da.iter().map(|&x| C64::new(x, 0.0)).collect();
        let g = gauss_manin_matrix(&ac, &dc, true).unwrap();
        let h = 1e-4;
        let (pp, pm, p0) = (periods(h), periods(-h), periods(0.0));
        let p0v = DVector::from_vec(p0);
        let pred = &g * &p0v;
        for k in 0..pp.len() {
            let fd = (pp[k] - pm[k]) / (2.0 * h);
            assert!((fd - pred[k]).norm() < 1e-6, "row {k}: {fd} vs {}", pred[k]);
        }
    }
}
