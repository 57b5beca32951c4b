//! The generalized Lagrange top of degree `g`: state, Lax vector field,
//! first integrals, Poisson brackets and RK4 time integration.
//!
//! Coordinates are `ω₁, ω₂, ω₃` followed by the rows `γ_{i,1..3}`,
//! `i = 1..g`. The derived row `γ_0 = (ω₁, ω₂, (1+m)ω₃)` is never stored.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopError {
    #[error("1 + m must be nonzero")]
    SingularMass,
    #[error("state has {got} gamma rows, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("non-finite state at t = {0}")]
    BlowUp(f64),
    #[error("invalid integration parameters: {0}")]
    BadParameters(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopState {
    pub g: usize,
    pub m: f64,
    pub omega: [f64; 3],
    pub gamma: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelVector {
    pub g: usize,
    pub m: f64,
    /// `h₋₁, h, h₁, …, h_{2g}`: length `2g + 2`.
    pub values: Vec<f64>,
}

impl LevelVector {
    pub fn h_minus1(&self) -> f64 {
        self.values[0]
    }
    pub fn h(&self) -> f64 {
        self.values[1]
    }
    /// `h_k` for `k = 1..=2g`.
    pub fn h_k(&self, k: usize) -> f64 {
        self.values[k + 1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integrals {
    pub levels: LevelVector,
    /// The unreduced `H₀`.
    pub h0: f64,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

const E3: [f64; 3] = [0.0, 0.0, 1.0];

impl TopState {
    pub fn new(g: usize, m: f64, omega: [f64; 3], gamma: Vec<[f64; 3]>) -> Result<Self, TopError> {
        let s = TopState { g, m, omega, gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), TopError> {
        if self.gamma.len() != self.g {
            return Err(TopError::ShapeMismatch { expected: self.g, got: self.gamma.len() });
        }
        if (1.0 + self.m).abs() < 1e-300 {
            return Err(TopError::SingularMass);
        }
        if !self.coords().iter().all(|x| x.is_finite()) {
            return Err(TopError::BlowUp(0.0));
        }
        Ok(())
    }

    /// Row `i` of the Lax data, `i = 0..=g`; zero beyond `g`.
    pub fn row(&self, i: usize) -> [f64; 3] {
        match i {
            0 => [self.omega[0], self.omega[1], (1.0 + self.m) * self.omega[2]],
            i if i <= self.g => self.gamma[i - 1],
            _ => [0.0; 3],
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut v = self.omega.to_vec();
        for r in &self.gamma {
            v.extend_from_slice(r);
        }
        v
    }

    pub fn from_coords(g: usize, m: f64, x: &[f64]) -> Self {
        TopState {
            g,
            m,
            omega: [x[0], x[1], x[2]],
            gamma: (0..g).map(|i| [x[3 + 3 * i], x[4 + 3 * i], x[5 + 3 * i]]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        3 + 3 * self.g
    }
}

/// Time derivative of the stored coordinates:
/// `γ̇₀ = γ₀×ω − γ₁×e₃`, `γ̇_i = γ_i×ω + γ_{i+1}×e₃` for `i ≥ 1`.
pub fn lax_rhs(s: &TopState) -> TopState {
    let w = s.omega;
    let d0 = cross(s.row(0), w);
    let t0 = cross(s.row(1), E3);
    let omega_dot = [d0[0] - t0[0], d0[1] - t0[1], 0.0];
    let gamma = (1..=s.g)
        .map(|i| {
            let a = cross(s.row(i), w);
            let b = cross(s.row(i + 1), E3);
            [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
        })
        .collect();
    TopState { g: s.g, m: s.m, omega: omega_dot, gamma }
}

/// Coefficient vectors of `Γ(λ) = e₃λ + γ₀ − Σ γ_i λ^{−i}` indexed by `1 − power`.
fn laurent_rows(s: &TopState) -> Vec<[f64; 3]> {
    let mut v = vec![E3, s.row(0)];
    for i in 1..=s.g {
        let r = s.row(i);
        v.push([-r[0], -r[1], -r[2]]);
    }
    v
}

/// `H_k = −¼ res_{λ=0} λ^{k−1} tr Γ(λ)²` for `k = −1..=2g`, read off the
/// Laurent coefficients (`tr ÂB̂ = −2 a·b`), plus the reduced `H`.
pub fn first_integrals(s: &TopState) -> Integrals {
    let rows = laurent_rows(s);
    // coefficient of λ^{−k} in G·G: pairs (p, q) of Laurent powers with p + q = −k
    let coef = |k: i64| -> f64 {
        let mut acc = 0.0;
        for (a, ra) in rows.iter().enumerate() {
            for (b, rb) in rows.iter().enumerate() {
                let pa = 1 - a as i64;
                let pb = 1 - b as i64;
                if pa + pb == -k {
                    acc += dot(*ra, *rb);
                }
            }
        }
        acc
    };
    let hk: Vec<f64> = (-1..=2 * s.g as i64).map(|k| 0.5 * coef(k)).collect();
    let h0 = hk[1];
    let hm1 = hk[0];
    let h = h0 - s.m / (2.0 * (1.0 + s.m)) * hm1 * hm1;
    let mut values = vec![hm1, h];
    values.extend_from_slice(&hk[2..]);
    Integrals { levels: LevelVector { g: s.g, m: s.m, values }, h0 }
}

/// Sparse polynomial in the state coordinates: exponent vector ↦ coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Observable {
    pub terms: BTreeMap<Vec<u32>, f64>,
    pub dim: usize,
}

impl Observable {
    pub fn zero(dim: usize) -> Self {
        Observable { terms: BTreeMap::new(), dim }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut o = Self::zero(dim);
        o.add_term(vec![0; dim], c);
        o
    }

    /// The coordinate `x_index`.
    pub fn coord(dim: usize, index: usize) -> Self {
        let mut e = vec![0; dim];
        e[index] = 1;
        let mut o = Self::zero(dim);
        o.add_term(e, 1.0);
        o
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        let v = self.terms.entry(exps).or_insert(0.0);
        *v += c;
    }

    pub fn add(&self, other: &Observable) -> Observable {
        let mut o = self.clone();
        for (e, c) in &other.terms {
            o.add_term(e.clone(), *c);
        }
        o
    }

    pub fn scale(&self, s: f64) -> Observable {
        Observable { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(), dim: self.dim }
    }

    pub fn mul(&self, other: &Observable) -> Observable {
        let mut o = Observable::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                o.add_term(e, ca * cb);
            }
        }
        o
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// `∂/∂x_i` evaluated at `x`.
    pub fn partial_at(&self, i: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut t = c * e[i] as f64;
            for (j, (&k, &xj)) in e.iter().zip(x).enumerate() {
                let k = if j == i { k - 1 } else { k };
                t *= xj.powi(k as i32);
            }
            acc += t;
        }
        acc
    }
}

/// Observable form of row `i` of the Lax data (component `k = 0..3`).
fn row_observable(g: usize, m: f64, i: usize, k: usize) -> Observable {
    let dim = 3 + 3 * g;
    if i == 0 {
        let o = Observable::coord(dim, k);
        if k == 2 {
            o.scale(1.0 + m)
        } else {
            o
        }
    } else {
        Observable::coord(dim, 3 + 3 * (i - 1) + k)
    }
}

/// Polynomial observables `[H₋₁, H, H₁, …, H_{2g}]`, built from the same
/// Laurent assembly as [`first_integrals`].
pub fn integral_observables(g: usize, m: f64) -> Vec<Observable> {
    let dim = 3 + 3 * g;
    let lrow = |p: usize, k: usize| -> Observable {
        // Laurent index p: 0 ↦ e₃, 1 ↦ γ₀, p ≥ 2 ↦ −γ_{p−1}
        match p {
            0 => Observable::constant(dim, if k == 2 { 1.0 } else { 0.0 }),
            1 => row_observable(g, m, 0, k),
            _ => row_observable(g, m, p - 1, k).scale(-1.0),
        }
    };
    let n = g + 2;
    let mut hk = Vec::new();
    for kk in -1..=(2 * g as i64) {
        let mut acc = Observable::zero(dim);
        for a in 0..n {
            for b in 0..n {
                if (1 - a as i64) + (1 - b as i64) == -kk {
                    for k in 0..3 {
                        acc = acc.add(&lrow(a, k).mul(&lrow(b, k)));
                    }
                }
            }
        }
        hk.push(acc.scale(0.5));
    }
    let hm1 = hk[0].clone();
    let h = hk[1].add(&hm1.mul(&hm1).scale(-m / (2.0 * (1.0 + m))));
    let mut out = vec![hm1, h];
    out.extend(hk.into_iter().skip(2));
    out
}

/// `{x_a, x_b}` for stored coordinates.
///
/// Rows obey `{γ_{i,k}, γ_{j,l}} = σ_{ij} Σ_c Λ^c_{kl} γ_{i+j,c}` with
/// `Λ₁₂ = (0,0,−1)`, `Λ₁₃ = (0,1,0)`, `Λ₂₃ = (−1,0,0)`, `γ_{i+j} = 0` for
/// `i + j > g`, and `σ_{ij} = −1` when both `i, j ≥ 1`. The sign is what
/// reproduces the printed equations of motion and the g = 2 table. The
/// stored `ω₃` is `γ_{0,3}/(1+m)`.
pub fn coord_bracket(s: &TopState, a: usize, b: usize) -> f64 {
    let (ia, ka) = (if a < 3 { 0 } else { (a - 3) / 3 + 1 }, a % 3);
    let (ib, kb) = (if b < 3 { 0 } else { (b - 3) / 3 + 1 }, b % 3);
    if ka == kb {
        return 0.0;
    }
    let ij = ia + ib;
    if ij > s.g {
        return 0.0;
    }
    let r = s.row(ij);
    // {x_k, x_l} = −ε_{klc} x_c
    let c = 3 - ka - kb;
    let eps = match (ka, kb) {
        (0, 1) | (1, 2) | (2, 0) => 1.0,
        _ => -1.0,
    };
    let mut v = -eps * r[c];
    if ia >= 1 && ib >= 1 {
        v = -v;
    }
    if a == 2 {
        v /= 1.0 + s.m;
    }
    if b == 2 {
        v /= 1.0 + s.m;
    }
    v
}

/// Leibniz-expanded `{F, G}` at `s`.
pub fn poisson_bracket(f: &Observable, g: &Observable, s: &TopState) -> f64 {
    let x = s.coords();
    let n = x.len();
    let df: Vec<f64> = (0..n).map(|i| f.partial_at(i, &x)).collect();
    let dg: Vec<f64> = (0..n).map(|i| g.partial_at(i, &x)).collect();
    let mut acc = 0.0;
    for a in 0..n {
        if df[a] == 0.0 {
            continue;
        }
        for b in 0..n {
            if dg[b] != 0.0 {
                acc += df[a] * dg[b] * coord_bracket(s, a, b);
            }
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<TopState>,
    /// Max relative drift of each of `[H₋₁, H, H₁, …, H_{2g}]`.
    pub drift: Vec<f64>,
}

fn axpy(s: &TopState, h: f64, d: &TopState) -> TopState {
    let x = s.coords();
    let dx = d.coords();
    let y: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + h * b).collect();
    TopState::from_coords(s.g, s.m, &y)
}

pub fn rk4_step(s: &TopState, dt: f64) -> TopState {
    let k1 = lax_rhs(s);
    let k2 = lax_rhs(&axpy(s, dt / 2.0, &k1));
    let k3 = lax_rhs(&axpy(s, dt / 2.0, &k2));
    let k4 = lax_rhs(&axpy(s, dt, &k3));
    let x = s.coords();
    let (a, b, c, d) = (k1.coords(), k2.coords(), k3.coords(), k4.coords());
    let y: Vec<f64> =
        (0..x.len()).map(|i| x[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect();
    TopState::from_coords(s.g, s.m, &y)
}

fn relative_drift(v0: &[f64], v: &[f64], scale: f64) -> Vec<f64> {
    v0.iter().zip(v).map(|(a, b)| (a - b).abs() / a.abs().max(scale)).collect()
}

/// Fixed-step classical RK4 from `0` to `t_end`, keeping every `sample_every`-th state
/// plus the last one.
pub fn integrate(s0: &TopState, t_end: f64, dt: f64, sample_every: usize) -> Result<Trajectory, TopError> {
    s0.validate()?;
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(TopError::BadParameters(format!("dt = {dt}, t_end = {t_end}")));
    }
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    let sample_every = sample_every.max(1);
    let i0 = first_integrals(s0).levels.values;
    let scale = i0.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-12) * 1e-3;
    let mut drift = vec![0.0; i0.len()];
    let mut s = s0.clone();
    let mut times = vec![0.0];
    let mut states = vec![s.clone()];
    for k in 1..=steps {
        s = rk4_step(&s, h);
        let t = k as f64 * h;
        if !s.coords().iter().all(|x| x.is_finite()) {
            return Err(TopError::BlowUp(t));
        }
        let ik = first_integrals(&s).levels.values;
        for (d, r) in drift.iter_mut().zip(relative_drift(&i0, &ik, scale)) {
            *d = f64::max(*d, r);
        }
        if k % sample_every == 0 || k == steps {
            times.push(t);
            states.push(s.clone());
        }
    }
    Ok(Trajectory { times, states, drift })
}

/// CSV header: `t, w1..w3, g{i}_{k}…, h_m1, h, h1…h{2g}`.
pub fn csv_header(g: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "w1".into(), "w2".into(), "w3".into()];
    for i in 1..=g {
        for k in 1..=3 {
            h.push(format!("g{i}_{k}"));
        }
    }
    h.push("h_m1".into());
    h.push("h".into());
    for k in 1..=2 * g {
        h.push(format!("h{k}"));
    }
    h
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> std::io::Result<()> {
    let g = traj.states.first().map_or(0, |s| s.g);
    writeln!(out, "{}", csv_header(g).join(","))?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![format!("{t:.12e}")];
        row.extend(s.coords().iter().map(|x| format!("{x:.17e}")));
        row.extend(first_integrals(s).levels.values.iter().map(|x| format!("{x:.17e}")));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Residuals of the Poisson structure at `s`: antisymmetry of the coordinate
/// brackets, the Jacobi identity, and involutivity of the first integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketResiduals {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub involution: f64,
}

pub fn bracket_residuals(s: &TopState) -> BracketResiduals {
    let n = s.dim();
    let pi: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| coord_bracket(s, a, b)).collect()).collect();
    let mut antisymmetry: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            antisymmetry = antisymmetry.max((pi[a][b] + pi[b][a]).abs());
        }
    }
    // The bracket is linear in the coordinates, so ∂_d π_ab is π_ab at the unit vector e_d.
    let grad: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|d| {
            let mut x = vec![0.0; n];
            x[d] = 1.0;
            let e = TopState::from_coords(s.g, s.m, &x);
            (0..n).map(|a| (0..n).map(|b| coord_bracket(&e, a, b)).collect()).collect()
        })
        .collect();
    let mut jacobi: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v: f64 = (0..n)
                    .map(|d| grad[d][a][b] * pi[d][c] + grad[d][b][c] * pi[d][a] + grad[d][c][a] * pi[d][b])
                    .sum();
                jacobi = jacobi.max(v.abs());
            }
        }
    }
    let obs = integral_observables(s.g, s.m);
    let mut involution: f64 = 0.0;
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            involution = involution.max(poisson_bracket(&obs[i], &obs[j], s).abs());
        }
    }
    BracketResiduals { antisymmetry, jacobi, involution }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn g0_rotation_rhs() {
        let s = TopState::new(0, 1.0, [1.0, 0.0, 1.0], vec![]).unwrap();
        let d = lax_rhs(&s);
        assert_eq!(d.omega, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn g1_equilibrium() {
        let s = TopState::new(1, 0.3, [0.0; 3], vec![[0.0, 0.0, 5.0]]).unwrap();
        let d = lax_rhs(&s);
        assert_eq!(d.coords(), vec![0.0; 6]);
    }

    #[test]
    fn g1_closed_forms() {
        let s = TopState::new(1, 0.0, [0.0; 3], vec![[0.0, 0.0, 1.0]]).unwrap();
        let h = first_integrals(&s).levels;
        assert_abs_diff_eq!(h.h(), -1.0);
        assert_abs_diff_eq!(h.h_k(1), 0.0);
        assert_abs_diff_eq!(h.h_k(2), 0.5);
    }

    #[test]
    fn omega_bracket_table() {
        let s = TopState::new(1, 0.5, [0.3, -0.2, 0.7], vec![[0.1, 0.4, -0.6]]).unwrap();
        assert_abs_diff_eq!(coord_bracket(&s, 0, 1), -(1.5) * 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(coord_bracket(&s, 1, 0), 1.5 * 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(coord_bracket(&s, 0, 2), -0.2 / 1.5, epsilon = 1e-15);
        // {γ₁, ω₃} = γ₂/(1+m), {γ₃, ω₂} = γ₁
        assert_abs_diff_eq!(coord_bracket(&s, 3, 2), 0.4 / 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(coord_bracket(&s, 5, 1), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn observables_match_direct_integrals() {
        let s = TopState::new(2, 0.4, [0.3, -0.2, 0.7], vec![[0.1, 0.4, -0.6], [0.5, -0.1, 0.2]]).unwrap();
        let obs = integral_observables(2, 0.4);
        let direct = first_integrals(&s).levels.values;
        for (o, d) in obs.iter().zip(direct) {
            assert_abs_diff_eq!(o.eval(&s.coords()), d, epsilon = 1e-14);
        }
    }

    #[test]
    fn hamiltonian_generates_flow() {
        let s = TopState::new(2, 0.4, [0.3, -0.2, 0.7], vec![[0.1, 0.4, -0.6], [0.5, -0.1, 0.2]]).unwrap();
        let h = &integral_observables(2, 0.4)[1];
        let rhs = lax_rhs(&s).coords();
        for (i, r) in rhs.iter().enumerate() {
            let xi = Observable::coord(s.dim(), i);
            assert_abs_diff_eq!(poisson_bracket(&xi, h, &s), *r, epsilon = 1e-14);
        }
    }

    #[test]
    fn csv_has_header() {
        let s = TopState::new(1, 0.0, [0.0; 3], vec![[0.0, 0.0, 1.0]]).unwrap();
        let tr = integrate(&s, 0.1, 0.05, 1).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&tr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,w1,w2,w3,g1_1,g1_2,g1_3,h_m1,h,h1,h2\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
