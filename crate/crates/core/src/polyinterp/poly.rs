use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Exponent vector `alpha` of a monomial `x^alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|alpha|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `alpha!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    pub fn sign(&self) -> f64 {
        if self.order().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `x^alpha`
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, xi)| xi.powi(a as i32)).product()
    }

    /// `d^beta x^alpha` at `x`, i.e. `alpha!/(alpha-beta)! x^(alpha-beta)` when `beta <= alpha`.
    pub fn monomial_derivative(&self, beta: &MultiIndex, x: &[f64]) -> f64 {
        let mut v = 1.0;
        for ((&a, &b), xi) in self.0.iter().zip(&beta.0).zip(x) {
            if b > a {
                return 0.0;
            }
            v *= falling(a, b) * xi.powi((a - b) as i32);
        }
        v
    }
}

pub(crate) fn factorial(k: u32) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `a (a-1) ... (a-b+1)`
pub(crate) fn falling(a: u32, b: u32) -> f64 {
    ((a - b + 1)..=a).map(|i| i as f64).product()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    falling(n, k) / factorial(k)
}

/// `dim P_k = C(n+k, n)`.
pub fn poly_space_dim(n: usize, k: u32) -> usize {
    binomial(n as u32 + k, n as u32).round() as usize
}

/// All multi-indices with `|alpha| <= k`, by increasing degree and, within a
/// degree, in decreasing lexicographic order (so `x` precedes `y`).
pub fn monomials(n: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(poly_space_dim(n, k));
    for deg in 0..=k {
        let mut level = Vec::new();
        push_with_degree(n, deg, &mut Vec::new(), &mut level);
        level.sort_by(|a: &MultiIndex, b| b.cmp(a));
        out.extend(level);
    }
    out
}

fn push_with_degree(n: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() == n - 1 {
        let used: u32 = prefix.iter().sum();
        let mut v = prefix.clone();
        v.push(deg - used);
        out.push(MultiIndex(v));
        return;
    }
    let used: u32 = prefix.iter().sum();
    for a in 0..=(deg - used) {
        prefix.push(a);
        push_with_degree(n, deg, prefix, out);
        prefix.pop();
    }
}

/// Polynomial of degree at most `degree` in `n` variables, in the monomial
/// basis ordered as [`monomials`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub n: usize,
    pub degree: u32,
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(n: usize, degree: u32, coeffs: Vec<f64>) -> Result<Self> {
        let d = poly_space_dim(n, degree);
        if coeffs.len() != d {
            return Err(Error::invalid(format!(
                "polynomial of degree {degree} in {n} variables needs {d} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Polynomial { n, degree, coeffs })
    }

    pub fn zero(n: usize, degree: u32) -> Self {
        Polynomial {
            n,
            degree,
            coeffs: vec![0.0; poly_space_dim(n, degree)],
        }
    }

    pub fn basis(&self) -> Vec<MultiIndex> {
        monomials(self.n, self.degree)
    }

    /// Builds from (exponent, coefficient) pairs; repeated exponents add up.
    pub fn from_terms(n: usize, degree: u32, terms: &[(MultiIndex, f64)]) -> Result<Self> {
        let basis = monomials(n, degree);
        let pos: HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut coeffs = vec![0.0; basis.len()];
        for (a, c) in terms {
            let i = pos
                .get(a)
                .ok_or_else(|| Error::invalid(format!("exponent {:?} exceeds degree {degree}", a.0)))?;
            coeffs[*i] += c;
        }
        Ok(Polynomial { n, degree, coeffs })
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> f64 {
        self.basis()
            .iter()
            .position(|a| a == alpha)
            .map(|i| self.coeffs[i])
            .unwrap_or(0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let values = monomial_values(self.n, self.degree, x);
        self.coeffs.iter().zip(&values).map(|(c, v)| c * v).sum()
    }

    /// `d^beta P`, with degree bound lowered by `|beta|` (zero polynomial when `|beta| > degree`).
    pub fn derivative(&self, beta: &MultiIndex) -> Polynomial {
        let order = beta.order();
        if order > self.degree {
            return Polynomial::zero(self.n, 0);
        }
        let new_degree = self.degree - order;
        let target = monomials(self.n, new_degree);
        let pos: HashMap<&MultiIndex, usize> = target.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut coeffs = vec![0.0; target.len()];
        for (alpha, c) in self.basis().iter().zip(&self.coeffs) {
            if !beta.le(alpha) {
                continue;
            }
            let gamma = alpha.sub(beta);
            let factor: f64 = alpha.0.iter().zip(&beta.0).map(|(&a, &b)| falling(a, b)).product();
            coeffs[pos[&gamma]] += c * factor;
        }
        Polynomial {
            n: self.n,
            degree: new_degree,
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial {
            n: self.n,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Product, truncated to total degree `max_degree`.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Polynomial {
        let deg = (self.degree + other.degree).min(max_degree);
        let target = monomials(self.n, deg);
        let pos: HashMap<&MultiIndex, usize> = target.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut coeffs = vec![0.0; target.len()];
        let b1 = self.basis();
        let b2 = other.basis();
        for (a, ca) in b1.iter().zip(&self.coeffs) {
            if *ca == 0.0 {
                continue;
            }
            for (b, cb) in b2.iter().zip(&other.coeffs) {
                if *cb == 0.0 || a.order() + b.order() > deg {
                    continue;
                }
                coeffs[pos[&a.add(b)]] += ca * cb;
            }
        }
        Polynomial {
            n: self.n,
            degree: deg,
            coeffs,
        }
    }
}

/// Values `x^alpha` for all basis monomials of `P_k`, in basis order.
pub fn monomial_values(n: usize, k: u32, x: &[f64]) -> Vec<f64> {
    monomials(n, k).iter().map(|a| a.monomial(x)).collect()
}

/// `P(x)` for `P` in `coeffs` over a precomputed basis.
pub(crate) fn eval_with_basis(basis: &[MultiIndex], coeffs: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let k = basis.last().map(|a| a.order()).unwrap_or(0) as usize;
    // powers[i][e] = x_i^e
    let mut powers = [[1.0f64; 16]; 3];
    for i in 0..n {
        for e in 1..=k.min(15) {
            powers[i][e] = powers[i][e - 1] * x[i];
        }
    }
    basis
        .iter()
        .zip(coeffs)
        .map(|(a, c)| {
            let mut m = *c;
            for (i, &e) in a.0.iter().enumerate() {
                m *= if (e as usize) < 16 { powers[i][e as usize] } else { x[i].powi(e as i32) };
            }
            m
        })
        .sum()
}

/// `P(x) = sum c_alpha x^alpha`.
pub fn poly_eval(p: &Polynomial, x: &[f64]) -> f64 {
    p.eval(x)
}

/// `d^beta P`.
pub fn poly_derivative(p: &Polynomial, beta: &MultiIndex) -> Polynomial {
    p.derivative(beta)
}
