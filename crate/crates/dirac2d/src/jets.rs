//! Truncated bivariate Taylor expansions with complex coefficients.
//!
//! A [`Jet`] stores the coefficients of a function of `(x, y)` expanded at a
//! base point, in Taylor normalization: the `(i, j)` entry is
//! `∂ₓ^i ∂_y^j f / (i! j!)`.  All arithmetic is exact on the stored triangle
//! `i + j <= order`, which makes jets a forward-mode differentiation substrate.

use num_complex::Complex64;
use thiserror::Error;

pub type C = Complex64;

/// Tolerance below which a constant term counts as zero for division and
/// branched functions.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum JetError {
    #[error("jet order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("cannot take a partial derivative of an order-0 jet")]
    OrderExhausted,
    #[error("singular jet: constant term {0} is within {SINGULAR_TOL} of zero")]
    SingularConstant(C),
    #[error("domain violation in {0}: constant term {1} too close to a branch point")]
    DomainViolation(&'static str, C),
}

/// Differentiation axis of the two jet variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Truncated bivariate Taylor expansion of order `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    /// Triangular storage: coefficient (i, j) with i + j <= order lives at
    /// `tri_index(order, i, j)`.
    coeffs: Vec<C>,
}

fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

fn tri_index(order: usize, i: usize, j: usize) -> usize {
    debug_assert!(i + j <= order);
    // rows of fixed i, each row has order + 1 - i entries
    i * (order + 1) - i * (i.saturating_sub(1)) / 2 + j
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet {
            order,
            coeffs: vec![C::new(0.0, 0.0); tri_len(order)],
        }
    }

    pub fn constant(order: usize, value: C) -> Self {
        let mut jet = Jet::zero(order);
        jet.coeffs[0] = value;
        jet
    }

    /// The jet of the coordinate function `x` (or `y`) at the given base value.
    pub fn variable(order: usize, axis: Axis, base: C) -> Self {
        let mut jet = Jet::constant(order, base);
        if order >= 1 {
            match axis {
                Axis::X => jet.set(1, 0, C::new(1.0, 0.0)),
                Axis::Y => jet.set(0, 1, C::new(1.0, 0.0)),
            }
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> C {
        self.coeffs[tri_index(self.order, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        let idx = tri_index(self.order, i, j);
        self.coeffs[idx] = v;
    }

    /// Value of the underlying function at the expansion point.
    pub fn value(&self) -> C {
        self.coeffs[0]
    }

    /// Largest coefficient magnitude (over the whole stored triangle).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Drop coefficients above `order` (must not exceed the current order).
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order, "cannot truncate {} up to {}", self.order, order);
        let mut out = Jet::zero(order);
        for i in 0..=order {
            for j in 0..=(order - i) {
                out.set(i, j, self.coeff(i, j));
            }
        }
        out
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet, JetError> {
        if self.order != other.order {
            return Err(JetError::OrderMismatch(self.order, other.order));
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, s: C) -> Jet {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= s;
        }
        out
    }

    /// Cauchy product truncated to the shared order.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        if self.order != other.order {
            return Err(JetError::OrderMismatch(self.order, other.order));
        }
        let n = self.order;
        let mut out = Jet::zero(n);
        for i1 in 0..=n {
            for j1 in 0..=(n - i1) {
                let a = self.coeff(i1, j1);
                if a == C::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..=(n - i1 - j1) {
                    for j2 in 0..=(n - i1 - j1 - i2) {
                        let b = other.coeff(i2, j2);
                        if b != C::new(0.0, 0.0) {
                            let idx = tri_index(n, i1 + i2, j1 + j2);
                            out.coeffs[idx] += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiply after truncating both factors to the smaller order.
    pub fn mul_trunc(&self, other: &Jet) -> Jet {
        let n = self.order.min(other.order);
        self.truncate(n)
            .checked_mul(&other.truncate(n))
            .expect("orders equal after truncation")
    }

    pub fn add_trunc(&self, other: &Jet) -> Jet {
        let n = self.order.min(other.order);
        self.truncate(n)
            .checked_add(&other.truncate(n))
            .expect("orders equal after truncation")
    }

    pub fn sub_trunc(&self, other: &Jet) -> Jet {
        self.add_trunc(&other.neg())
    }

    /// Multiplicative inverse to stored order; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0.norm() <= SINGULAR_TOL {
            return Err(JetError::SingularConstant(a0));
        }
        // 1/(a0 + u) = (1/a0) Σ (-u/a0)^k with u nilpotent
        let inv0 = C::new(1.0, 0.0) / a0;
        let mut series = Vec::with_capacity(self.order + 1);
        let mut c = inv0;
        series.push(c);
        for _ in 0..self.order {
            c = -c * inv0;
            series.push(c);
        }
        Ok(self.compose(&series))
    }

    /// Taylor composition `f(self)` from the univariate series of `f` at the
    /// constant term: `series[k] = f^(k)(a00) / k!`.
    pub fn compose(&self, series: &[C]) -> Jet {
        assert!(series.len() > self.order, "series too short for jet order");
        let n = self.order;
        let mut shifted = self.clone();
        shifted.coeffs[0] = C::new(0.0, 0.0);
        let mut result = Jet::constant(n, series[0]);
        let mut power = Jet::constant(n, C::new(1.0, 0.0));
        for coeff in series.iter().take(n + 1).skip(1) {
            power = power.checked_mul(&shifted).expect("same order");
            result = result
                .checked_add(&power.scale(*coeff))
                .expect("same order");
        }
        result
    }

    /// Integer power by repeated multiplication (negative via reciprocal).
    pub fn powi(&self, exp: i64) -> Result<Jet, JetError> {
        if exp < 0 {
            return self.reciprocal()?.powi(-exp);
        }
        let mut out = Jet::constant(self.order, C::new(1.0, 0.0));
        for _ in 0..exp {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    /// Partial derivative; drops one order.
    pub fn partial(&self, axis: Axis) -> Result<Jet, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        let n = self.order - 1;
        let mut out = Jet::zero(n);
        for i in 0..=n {
            for j in 0..=(n - i) {
                let v = match axis {
                    Axis::X => self.coeff(i + 1, j) * C::new((i + 1) as f64, 0.0),
                    Axis::Y => self.coeff(i, j + 1) * C::new((j + 1) as f64, 0.0),
                };
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0.norm() <= SINGULAR_TOL {
            return Err(JetError::DomainViolation("sqrt", a0));
        }
        let root = a0.sqrt();
        // c_k = c_{k-1} (3/2 - k) / (k a0), starting from c_0 = sqrt(a0)
        let mut series = Vec::with_capacity(self.order + 1);
        let mut c = root;
        series.push(c);
        for k in 1..=self.order {
            c = c * C::new(1.5 - k as f64, 0.0) / (C::new(k as f64, 0.0) * a0);
            series.push(c);
        }
        Ok(self.compose(&series))
    }

    pub fn exp(&self) -> Jet {
        let e0 = self.value().exp();
        let mut series = Vec::with_capacity(self.order + 1);
        let mut c = e0;
        series.push(c);
        for k in 1..=self.order {
            c /= C::new(k as f64, 0.0);
            series.push(c);
        }
        self.compose(&series)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a0 = self.value();
        if a0.norm() <= SINGULAR_TOL {
            return Err(JetError::DomainViolation("ln", a0));
        }
        // ln(a0) then (-1)^(k-1) / (k a0^k)
        let mut series = Vec::with_capacity(self.order + 1);
        series.push(a0.ln());
        let inv0 = C::new(1.0, 0.0) / a0;
        let mut p = C::new(1.0, 0.0);
        for k in 1..=self.order {
            p *= inv0;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(p * C::new(sign / k as f64, 0.0));
        }
        Ok(self.compose(&series))
    }

    pub fn sin(&self) -> Jet {
        self.trig(true)
    }

    pub fn cos(&self) -> Jet {
        self.trig(false)
    }

    fn trig(&self, sin_first: bool) -> Jet {
        let a0 = self.value();
        let (s, c) = (a0.sin(), a0.cos());
        let cycle = if sin_first {
            [s, c, -s, -c]
        } else {
            [c, -s, -c, s]
        };
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            series.push(cycle[k % 4] / C::new(fact, 0.0));
        }
        self.compose(&series)
    }

    pub fn sinh(&self) -> Jet {
        self.hyper(true)
    }

    pub fn cosh(&self) -> Jet {
        self.hyper(false)
    }

    fn hyper(&self, sinh_first: bool) -> Jet {
        let a0 = self.value();
        let (s, c) = (a0.sinh(), a0.cosh());
        let cycle = if sinh_first { [s, c] } else { [c, s] };
        let mut series = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            series.push(cycle[k % 2] / C::new(fact, 0.0));
        }
        self.compose(&series)
    }
}
