//! Dense complex polynomials: evaluation, Aberth–Ehrlich roots, Sylvester
//! discriminants and exact Sturm counting of real roots.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("root finder did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("polynomial degree {degree} is below the required minimum {required}")]
    DegreeTooLow { degree: isize, required: isize },
    #[error("coefficient {index} has imaginary part {imag:e}; a real polynomial is required")]
    NotReal { index: usize, imag: f64 },
    #[error("polynomial vanishes at interval endpoint {0}")]
    RootAtEndpoint(f64),
    #[error("non-finite coefficient")]
    NonFinite,
}

/// Coefficients in ascending order: `coeffs[k]` multiplies `x^k`.
/// Trailing zeros are stripped, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct ComplexPoly {
    coeffs: Vec<C64>,
}

impl fmt::Debug for ComplexPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: C64, k: usize) -> Self {
        let mut v = vec![C64::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `x^n + a[0] x^{n-1} + … + a[n-1]` with `n = a.len()`.
    pub fn monic_from_tail(a: &[C64]) -> Self {
        let n = a.len();
        let mut v = vec![C64::zero(); n + 1];
        v[n] = C64::new(1.0, 0.0);
        for (j, &aj) in a.iter().enumerate() {
            v[n - 1 - j] = aj;
        }
        Self::new(v)
    }

    pub fn monic_from_real_tail(a: &[f64]) -> Self {
        let a: Vec<C64> = a.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::monic_from_tail(&a)
    }

    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Self::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = &p * &Self::new(vec![-r, C64::new(1.0, 0.0)]);
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Degree, or −1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::zero();
        let mut dp = C64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Largest imaginary part relative to the coefficient scale.
    pub fn imag_residual(&self) -> f64 {
        let scale = self.max_abs_coeff().max(1e-300);
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / scale
    }

    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    fn check_finite(&self) -> Result<(), PolyError> {
        if self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(PolyError::NonFinite)
        }
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut v = vec![C64::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        ComplexPoly::new(v)
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

const ABERTH_MAX_ITER: usize = 500;

/// Fujiwara's upper bound on the moduli of the roots.
pub fn fujiwara_bound(p: &ComplexPoly) -> f64 {
    let n = p.degree() as usize;
    let lead = p.lead().norm();
    let mut b: f64 = 0.0;
    for k in 1..=n {
        let c = p.coeff(n - k).norm() / lead;
        let c = if k == n { c / 2.0 } else { c };
        b = b.max(c.powf(1.0 / k as f64));
    }
    2.0 * b
}

/// All roots by simultaneous Aberth–Ehrlich iteration, sorted by
/// (real, imag).
///
/// Each returned `r` satisfies `|p(r)| ≤ tol · max|coeff| · max(1,|r|)^deg`.
pub fn roots(p: &ComplexPoly, tol: f64) -> Result<Vec<C64>, PolyError> {
    p.check_finite()?;
    let n = p.degree();
    if n < 1 {
        return Err(PolyError::DegreeTooLow { degree: n, required: 1 });
    }
    let n = n as usize;
    let mut z = initial_guesses(p, n);
    let dp = p.derivative();
    let scale = p.max_abs_coeff();
    let residual = |r: C64| p.eval(r).norm() / (scale * r.norm().max(1.0).powi(n as i32));

    let mut iterations = 0;
    let mut converged = vec![false; n];
    while iterations < ABERTH_MAX_ITER {
        iterations += 1;
        let mut moved = false;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let pk = p.eval(z[k]);
            if pk.norm() == 0.0 {
                converged[k] = true;
                continue;
            }
            let w = pk / dp.eval(z[k]);
            let mut s = C64::zero();
            for j in 0..n {
                if j != k {
                    s += (z[k] - z[j]).inv();
                }
            }
            let step = w / (C64::new(1.0, 0.0) - w * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[k] -= step;
            moved = true;
            if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(1e-300) {
                converged[k] = true;
            }
        }
        if !moved || converged.iter().all(|&c| c) {
            break;
        }
    }
    // One Newton polish per root; harmless for simple roots, skipped if it worsens.
    for zk in z.iter_mut() {
        let (v, d) = p.eval_with_derivative(*zk);
        if d.norm() > 0.0 {
            let cand = *zk - v / d;
            if residual(cand) < residual(*zk) {
                *zk = cand;
            }
        }
    }
    let worst = z.iter().map(|&r| residual(r)).fold(0.0, f64::max);
    if worst > tol || !worst.is_finite() {
        return Err(PolyError::NoConvergence { iterations, residual: worst });
    }
    sort_roots(&mut z);
    Ok(z)
}

fn initial_guesses(p: &ComplexPoly, n: usize) -> Vec<C64> {
    let r = fujiwara_bound(p).max(1e-12);
    let shift = -p.coeff(n - 1) / (p.lead() * n as f64);
    (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            shift + C64::from_polar(r, th)
        })
        .collect()
}

pub fn sort_roots(z: &mut [C64]) {
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Sylvester matrix of `p` and `q`, coefficients in descending order.
pub fn sylvester_matrix(p: &ComplexPoly, q: &ComplexPoly) -> DMatrix<C64> {
    let m = p.degree() as usize;
    let n = q.degree() as usize;
    let size = m + n;
    let mut s = DMatrix::<C64>::zeros(size, size);
    for row in 0..n {
        for k in 0..=m {
            s[(row, row + k)] = p.coeff(m - k);
        }
    }
    for row in 0..m {
        for k in 0..=n {
            s[(n + row, row + k)] = q.coeff(n - k);
        }
    }
    s
}

pub fn resultant(p: &ComplexPoly, q: &ComplexPoly) -> C64 {
    if p.degree() < 0 || q.degree() < 0 {
        return C64::zero();
    }
    if p.degree() == 0 && q.degree() == 0 {
        return C64::new(1.0, 0.0);
    }
    sylvester_matrix(p, q).determinant()
}

/// `disc(p) = (−1)^{n(n−1)/2} Res(p, p′) / lead(p)`, which equals
/// `lead^{2n−2} ∏_{i<j} (r_i − r_j)²` for every degree; e.g. `x²+bx+c ↦ b²−4c`.
pub fn discriminant(p: &ComplexPoly) -> Result<C64, PolyError> {
    p.check_finite()?;
    let n = p.degree();
    if n < 2 {
        return Err(PolyError::DegreeTooLow { degree: n, required: 2 });
    }
    let res = resultant(p, &p.derivative());
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(res * sign / p.lead())
}

/// Discriminant divided by `max|coeff|^{2n−2}`, invariant under `p ↦ λp`.
pub fn normalized_discriminant(p: &ComplexPoly) -> Result<C64, PolyError> {
    let d = discriminant(p)?;
    let n = p.degree() as i32;
    Ok(d / p.max_abs_coeff().powi(2 * n - 2))
}

type QPoly = Vec<BigRational>;

fn q_strip(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn q_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let f = r[r.len() - 1].clone() / lb.clone();
        for (k, bk) in b.iter().enumerate() {
            let t = f.clone() * bk.clone();
            r[shift + k] -= t;
        }
        r.pop();
        r = q_strip(r);
    }
    q_strip(r)
}

fn q_eval(p: &QPoly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x.clone() + c.clone())
}

fn sturm_chain(p: QPoly) -> Vec<QPoly> {
    let dp: QPoly = q_strip(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * BigRational::from_integer(BigInt::from(k)))
            .collect(),
    );
    let mut chain = vec![p, dp];
    while !chain.last().unwrap().is_empty() {
        let n = chain.len();
        let r = q_rem(&chain[n - 2], &chain[n - 1]);
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain.pop();
    chain
}

fn variations<I: Iterator<Item = i8>>(signs: I) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Number of distinct real roots, over all of ℝ or inside `(a, b)`.
///
/// The Sturm sequence is built in exact rational arithmetic from the
/// (dyadic) f64 coefficients, so the count is exact for the given input.
pub fn real_root_count(p: &ComplexPoly, interval: Option<(f64, f64)>) -> Result<usize, PolyError> {
    p.check_finite()?;
    let scale = p.max_abs_coeff();
    for (i, c) in p.coeffs().iter().enumerate() {
        if c.im.abs() > 1e-12 * scale {
            return Err(PolyError::NotReal { index: i, imag: c.im });
        }
    }
    if p.degree() < 1 {
        return Ok(0);
    }
    let q: QPoly = p
        .coeffs()
        .iter()
        .map(|c| BigRational::from_float(c.re).expect("finite"))
        .collect();
    let q = q_strip(q);
    let chain = sturm_chain(q.clone());
    match interval {
        None => {
            let at_pos = variations(chain.iter().map(|s| sign_of(s.last().unwrap())));
            let at_neg = variations(chain.iter().map(|s| {
                let lc = sign_of(s.last().unwrap());
                if (s.len() - 1) % 2 == 1 {
                    -lc
                } else {
                    lc
                }
            }));
            Ok(at_neg - at_pos)
        }
        Some((a, b)) => {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let qa = BigRational::from_float(a).ok_or(PolyError::NonFinite)?;
            let qb = BigRational::from_float(b).ok_or(PolyError::NonFinite)?;
            if q_eval(&q, &qa).is_zero() {
                return Err(PolyError::RootAtEndpoint(a));
            }
            if q_eval(&q, &qb).is_zero() {
                return Err(PolyError::RootAtEndpoint(b));
            }
            let va = variations(chain.iter().map(|s| sign_of(&q_eval(s, &qa))));
            let vb = variations(chain.iter().map(|s| sign_of(&q_eval(s, &qb))));
            Ok(va - vb)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn strips_trailing_zeros() {
        let p = ComplexPoly::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(ComplexPoly::from_real(&[0.0]).degree(), -1);
    }

    #[test]
    fn roots_of_x2_plus_1() {
        let r = roots(&ComplexPoly::from_real(&[1.0, 0.0, 1.0]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0].im, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].im, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn roots_on_unit_circle() {
        let r = roots(&ComplexPoly::from_real(&[1.0, 0.0, 1.0, 0.0, 1.0]), 1e-12).unwrap();
        for z in &r {
            assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(z.re.abs(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn disc_quadratic() {
        let d = discriminant(&ComplexPoly::from_real(&[1.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(d.re, -4.0, epsilon = 1e-12);
        let d = discriminant(&ComplexPoly::from_real(&[3.0, 5.0, 2.0])).unwrap();
        assert_abs_diff_eq!(d.re, 25.0 - 24.0, epsilon = 1e-12);
    }

    #[test]
    fn disc_square_vanishes() {
        let q = ComplexPoly::from_real(&[1.0, 0.5, 1.0]);
        let d = discriminant(&(&q * &q)).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn disc_cubic_closed_form() {
        // x³ + px + q: −4p³ − 27q²
        let (p, q) = (-2.0, 0.7);
        let d = discriminant(&ComplexPoly::from_real(&[q, p, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(d.re, -4.0 * p * p * p - 27.0 * q * q, epsilon = 1e-10);
    }

    #[test]
    fn sturm_counts() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(real_root_count(&p, None).unwrap(), 0);
        // (x−1)²(x²+1)
        let p = &ComplexPoly::from_real(&[1.0, -2.0, 1.0]) * &ComplexPoly::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(real_root_count(&p, None).unwrap(), 1);
        let p = ComplexPoly::from_real(&[0.0, -1.0, 0.0, 1.0]);
        assert_eq!(real_root_count(&p, None).unwrap(), 3);
        assert_eq!(real_root_count(&p, Some((-0.5, 2.0))).unwrap(), 2);
        assert!(matches!(real_root_count(&p, Some((1.0, 2.0))), Err(PolyError::RootAtEndpoint(_))));
    }

    #[test]
    fn sturm_rejects_complex() {
        let p = ComplexPoly::new(vec![c(1.0, 0.5), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(real_root_count(&p, None), Err(PolyError::NotReal { .. })));
    }

    #[test]
    fn fujiwara_bounds_roots() {
        let p = ComplexPoly::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.0]);
        let b = fujiwara_bound(&p);
        for r in roots(&p, 1e-10).unwrap() {
            assert!(r.norm() <= b);
        }
    }
}
