//! Jacobi polynomials `U, V, W` of a state and the spectral polynomial
//! `f = V² + UW = x^{2g+2} + a₁x^{2g+1} + … + a_{2g+2}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::poly::ComplexPoly;
use crate::topsys::{first_integrals, LevelVector, TopState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoeffs {
    pub g: usize,
    /// `a₁ … a_{2g+2}`.
    pub a: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn new(a: Vec<f64>) -> Self {
        assert!(a.len() >= 2 && a.len() % 2 == 0, "need an even number ≥ 2 of coefficients");
        SpectralCoeffs { g: a.len() / 2 - 1, a }
    }

    pub fn poly(&self) -> ComplexPoly {
        ComplexPoly::monic_from_real_tail(&self.a)
    }
}

/// `(U, V, W)` with `U = x^{g+1} + ((1+m)ω₃ − iω₂)x^g − Σ (γ_{k,3} − iγ_{k,2}) x^{g−k}`,
/// `W` the conjugate pattern and `V = ω₁x^g − Σ γ_{k,1} x^{g−k}`.
pub fn jacobi_uvw(s: &TopState) -> (ComplexPoly, ComplexPoly, ComplexPoly) {
    let g = s.g;
    let mut u = vec![C64::default(); g + 2];
    let mut w = vec![C64::default(); g + 2];
    let mut v = vec![C64::default(); g + 1];
    u[g + 1] = C64::new(1.0, 0.0);
    w[g + 1] = C64::new(1.0, 0.0);
    let r0 = s.row(0);
    u[g] = C64::new(r0[2], -r0[1]);
    w[g] = C64::new(r0[2], r0[1]);
    v[g] = C64::new(r0[0], 0.0);
    for k in 1..=g {
        let r = s.row(k);
        u[g - k] = -C64::new(r[2], -r[1]);
        w[g - k] = -C64::new(r[2], r[1]);
        v[g - k] = C64::new(-r[0], 0.0);
    }
    (ComplexPoly::new(u), ComplexPoly::new(v), ComplexPoly::new(w))
}

/// `V² + UW` as a complex polynomial (real up to rounding for real states).
pub fn spectral_poly_from_state(s: &TopState) -> ComplexPoly {
    let (u, v, w) = jacobi_uvw(s);
    &(&v * &v) + &(&u * &w)
}

pub fn spectral_from_state(s: &TopState) -> SpectralCoeffs {
    let f = spectral_poly_from_state(s);
    let n = 2 * s.g + 2;
    SpectralCoeffs { g: s.g, a: (1..=n).map(|j| f.coeff(n - j).re).collect() }
}

/// `a₁ = 2h₋₁`, `a₂ = 2h + (m/(1+m))h₋₁²`, `a_{k+2} = 2h_k`.
pub fn spectral_from_levels(h: &LevelVector) -> SpectralCoeffs {
    let hm1 = h.h_minus1();
    let mut a = vec![2.0 * hm1, 2.0 * h.h() + h.m / (1.0 + h.m) * hm1 * hm1];
    for k in 1..=2 * h.g {
        a.push(2.0 * h.h_k(k));
    }
    SpectralCoeffs { g: h.g, a }
}

/// Inverse of [`spectral_from_levels`].
pub fn levels_from_spectral(f: &SpectralCoeffs, m: f64) -> LevelVector {
    let hm1 = f.a[0] / 2.0;
    let h = (f.a[1] - m / (1.0 + m) * hm1 * hm1) / 2.0;
    let mut values = vec![hm1, h];
    values.extend(f.a[2..].iter().map(|x| x / 2.0));
    LevelVector { g: f.g, m, values }
}

/// Max coefficient deviation of `V² + UW` from the level-based polynomial,
/// relative to the coefficient scale.
pub fn identity_residual(s: &TopState) -> f64 {
    let f = spectral_poly_from_state(s);
    let levels = spectral_from_levels(&first_integrals(s).levels).poly();
    let scale = f.max_abs_coeff().max(1.0);
    (&f - &levels).max_abs_coeff() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_g1() {
        let s = TopState::new(1, 0.0, [0.0, 0.0, 1.0], vec![[0.0; 3]]).unwrap();
        let (u, v, w) = jacobi_uvw(&s);
        assert_eq!(u, ComplexPoly::from_real(&[0.0, 1.0, 1.0]));
        assert!(v.is_zero());
        assert_eq!(w, u);
    }

    #[test]
    fn levels_round_trip() {
        let h = LevelVector { g: 1, m: 0.0, values: vec![0.0, 0.5, 0.0, 0.5] };
        let f = spectral_from_levels(&h);
        assert_eq!(f.a, vec![0.0, 1.0, 0.0, 1.0]);
        let back = levels_from_spectral(&f, 0.0);
        assert_eq!(back, h);
    }

    #[test]
    fn g2_degenerate_level() {
        let h = LevelVector { g: 2, m: 0.0, values: vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0] };
        assert_eq!(spectral_from_levels(&h).a, vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn identity_holds_g2() {
        let s = TopState::new(2, 0.3, [0.2, -0.5, 0.9], vec![[0.3, 0.1, -0.4], [0.7, 0.2, 0.05]]).unwrap();
        assert!(identity_residual(&s) < 1e-14);
        let f = spectral_poly_from_state(&s);
        assert!(f.imag_residual() < 1e-15);
        let (u, v, w) = jacobi_uvw(&s);
        assert_eq!(w, u.conj());
        assert_abs_diff_eq!(v.coeff(0).re, -0.7);
    }
}
