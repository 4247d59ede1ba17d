use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::polyinterp::{factorial, monomials, MultiIndex, Polynomial};

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        factorial(k / 2 - 1)
    } else {
        // Γ(j + 1/2) = (2j)! sqrt(pi) / (4^j j!)
        let j = (k - 1) / 2;
        factorial(2 * j) * PI.sqrt() / (4f64.powi(j as i32) * factorial(j))
    }
}

/// A polynomial stored as its nonzero terms, for fast repeated evaluation.
#[derive(Clone, Debug, Default)]
pub(crate) struct SparsePoly {
    terms: Vec<([u32; 3], f64)>,
    max_exp: u32,
}

impl SparsePoly {
    fn from_poly(p: &Polynomial) -> Self {
        let mut terms = Vec::new();
        let mut max_exp = 0;
        for (a, c) in p.basis().iter().zip(&p.coeffs) {
            if *c != 0.0 {
                let mut e = [0u32; 3];
                for (k, v) in a.0.iter().enumerate() {
                    e[k] = *v;
                    max_exp = max_exp.max(*v);
                }
                terms.push((e, *c));
            }
        }
        SparsePoly { terms, max_exp }
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        let mut pw = [[1.0f64; 32]; 3];
        let top = (self.max_exp as usize).min(31);
        for (k, xk) in x.iter().enumerate() {
            for e in 1..=top {
                pw[k][e] = pw[k][e - 1] * xk;
            }
        }
        self.terms
            .iter()
            .map(|(e, c)| c * pw[0][e[0] as usize] * pw[1][e[1] as usize] * pw[2][e[2] as usize])
            .sum()
    }
}

/// `φ(x) = c (1 - |x|^2)^m` on the unit ball, zero outside, with `∫φ = 1`.
#[derive(Clone, Debug)]
pub struct Mollifier {
    n: usize,
    m: u32,
    c: f64,
    /// `∂^alpha` of the profile polynomial for every `|alpha| <= 2m`, in `monomials(n, 2m)` order.
    derivs: Vec<SparsePoly>,
    alphas: Vec<MultiIndex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub n: usize,
    pub m: u32,
    pub normalization: f64,
}

impl Mollifier {
    pub fn new(n: usize, m: u32) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::invalid(format!("dimension must be 1..=3, got {n}")));
        }
        if m < 1 {
            return Err(Error::invalid("profile order m must be at least 1"));
        }
        // ∫_B (1 - |x|^2)^m = pi^(n/2) m! / Γ(m + 1 + n/2)
        let c = gamma_half(2 * m + 2 + n as u32) / (PI.powf(n as f64 / 2.0) * factorial(m));
        let terms: Vec<(MultiIndex, f64)> = monomials(n, m)
            .into_iter()
            .map(|g| {
                let k = g.order();
                let coeff = factorial(m) / (g.factorial() * factorial(m - k)) * g.sign();
                (MultiIndex(g.0.iter().map(|e| 2 * e).collect()), coeff)
            })
            .collect();
        let profile = Polynomial::from_terms(n, 2 * m, &terms)?;
        let alphas = monomials(n, 2 * m);
        let derivs = alphas
            .iter()
            .map(|a| SparsePoly::from_poly(&profile.derivative(a)))
            .collect();
        Ok(Mollifier { n, m, c, derivs, alphas })
    }

    /// Smallest admissible profile order for critical order `n_p`.
    pub fn for_critical_order(n: usize, n_p: u32) -> Result<Self> {
        Self::new(n, n_p + 3)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    pub fn spec(&self) -> MollifierSpec {
        MollifierSpec { n: self.n, m: self.m, normalization: self.c }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().map(|v| v * v).sum();
        if s >= 1.0 {
            0.0
        } else {
            self.c * (1.0 - s).powi(self.m as i32)
        }
    }

    pub(crate) fn alpha_index(&self, beta: &MultiIndex) -> Option<usize> {
        self.alphas.iter().position(|a| a == beta)
    }

    /// `∂^beta φ(x)` for `|beta| < m` (the profile is `C^(m-1)` across the sphere).
    pub fn derivative(&self, beta: &MultiIndex, x: &[f64]) -> Result<f64> {
        if beta.order() >= self.m {
            return Err(Error::ProfileTooRough { order: beta.order(), profile: self.m });
        }
        Ok(self.derivative_unchecked(self.alpha_index(beta).expect("order below 2m"), x))
    }

    /// `∂^alpha φ(x)` by index into the precomputed table; zero outside the ball.
    pub(crate) fn derivative_unchecked(&self, idx: usize, x: &[f64]) -> f64 {
        let s: f64 = x.iter().map(|v| v * v).sum();
        if s >= 1.0 {
            return 0.0;
        }
        self.c * self.derivs[idx].eval(x)
    }

    /// `∂^alpha` of the profile polynomial (not truncated to the ball).
    pub(crate) fn polynomial_derivative(&self, idx: usize, x: &[f64]) -> f64 {
        self.c * self.derivs[idx].eval(x)
    }

    pub(crate) fn alphas(&self) -> &[MultiIndex] {
        &self.alphas
    }
}

/// `x -> ∂^beta φ(x)` as a closure.
pub fn mollifier_derivative<'a>(phi: &'a Mollifier, beta: &MultiIndex) -> Result<impl Fn(&[f64]) -> f64 + 'a> {
    if beta.order() >= phi.m {
        return Err(Error::ProfileTooRough { order: beta.order(), profile: phi.m });
    }
    let idx = phi.alpha_index(beta).expect("order below 2m");
    Ok(move |x: &[f64]| phi.derivative_unchecked(idx, x))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else if order == 1 { x } else { p1 };
            let pm1 = if order == 1 { 1.0 } else { p0 };
            dp = order as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}
