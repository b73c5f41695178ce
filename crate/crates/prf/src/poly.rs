//! Dense univariate polynomials over a [`FieldCtx`].
//!
//! Coefficients are field labels, low degree first; the highest-index
//! coefficient is nonzero unless the polynomial is zero (empty vector).

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("cannot scale the argument by zero")]
    ZeroScale,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("malformed polynomial text: {0}")]
    Parse(String),
}

/// A polynomial over GF(q); `coeffs[i]` is the coefficient of x^i.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

impl Poly {
    /// Builds from labels, stripping leading zeros.
    pub fn from_coeffs(coeffs: Vec<FieldElem>) -> Poly {
        let mut p = Poly { coeffs };
        p.normalize();
        p
    }

    /// Convenience constructor from raw labels.
    pub fn from_labels(labels: &[u16]) -> Poly {
        Poly::from_coeffs(labels.iter().map(|&l| FieldElem(l)).collect())
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly {
            coeffs: vec![FieldElem::ONE],
        }
    }

    /// The monomial x.
    pub fn x() -> Poly {
        Poly {
            coeffs: vec![FieldElem::ZERO, FieldElem::ONE],
        }
    }

    pub fn constant(c: FieldElem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    fn normalize(&mut self) {
        while self.coeffs.last() == Some(&FieldElem::ZERO) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElem::ONE
    }

    /// Horner evaluation.
    pub fn eval(&self, ctx: &FieldCtx, x: FieldElem) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, x), c);
        }
        acc
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ctx.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| ctx.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = ctx.add(coeffs[i + j], ctx.mul(a, b));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scalar_mul(&self, ctx: &FieldCtx, s: FieldElem) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&c| ctx.mul(c, s)).collect())
    }

    /// f(x) -> f(x+b), by iterated synthetic division at the root -b:
    /// writing f(x) = sum c_i (x+b)^i, each division step peels off c_i.
    pub fn shift_arg(&self, ctx: &FieldCtx, b: FieldElem) -> Poly {
        if b.is_zero() || self.is_zero() {
            return self.clone();
        }
        let mut work = self.coeffs.clone();
        let mut out = vec![FieldElem::ZERO; work.len()];
        for slot in out.iter_mut() {
            if work.is_empty() {
                break;
            }
            // Writing f(z) = sum g_i (z-b)^i gives f(x+b) = sum g_i x^i,
            // so peel off g_i by synthetic division at the root b: after
            // the pass, work[0] is the remainder work(b) and work[1..]
            // holds the quotient coefficients shifted up by one slot.
            let mut acc = FieldElem::ZERO;
            for c in work.iter_mut().rev() {
                acc = ctx.add(ctx.mul(acc, b), *c);
                *c = acc;
            }
            *slot = work[0];
            work.remove(0);
        }
        Poly::from_coeffs(out)
    }

    /// f(x) -> f(rx), r nonzero: coefficient i is multiplied by r^i.
    pub fn scale_arg(&self, ctx: &FieldCtx, r: FieldElem) -> Result<Poly, PolyError> {
        if r.is_zero() {
            return Err(PolyError::ZeroScale);
        }
        let mut pw = FieldElem::ONE;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = ctx.mul(c, pw);
                pw = ctx.mul(pw, r);
                out
            })
            .collect();
        Ok(Poly::from_coeffs(coeffs))
    }

    /// Scales so the leading coefficient is 1; monic(0) = 0.
    pub fn monic(&self, ctx: &FieldCtx) -> Poly {
        let lead = self.leading();
        if lead.is_zero() || lead == FieldElem::ONE {
            return self.clone();
        }
        self.scalar_mul(ctx, ctx.inv(lead).expect("nonzero leading"))
    }

    /// Quotient and remainder of self / divisor.
    pub fn divrem(&self, ctx: &FieldCtx, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = ctx.inv(divisor.leading()).unwrap();
        let mut quot = vec![FieldElem::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = ctx.mul(rem[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = ctx.sub(rem[i - dd + j], ctx.mul(c, dc));
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic gcd via the Euclidean algorithm.
    pub fn gcd(&self, ctx: &FieldCtx, other: &Poly) -> Result<Poly, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(ctx, &b);
            a = b;
            b = r;
        }
        Ok(a.monic(ctx))
    }

    /// Parses the text form "c0,c1,...,cn" of labels.
    pub fn parse(s: &str) -> Result<Poly, PolyError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Poly::zero());
        }
        let labels: Result<Vec<u16>, _> = s.split(',').map(|t| t.trim().parse::<u16>()).collect();
        let labels = labels.map_err(|e| PolyError::Parse(format!("{s:?}: {e}")))?;
        Ok(Poly::from_labels(&labels))
    }
}

impl fmt::Display for Poly {
    /// Text form: coefficient labels low-to-high, comma-separated
    /// ("0" for the zero polynomial).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}
