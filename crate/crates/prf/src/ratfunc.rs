//! Rational functions over GF(q) acting on the projective line.
//!
//! A [`RatFn`] is stored in canonical form: gcd-reduced with a monic
//! denominator, so function equality is coefficient-vector equality.
//! Permutations of P^1(F_q) index the domain 0..q-1 plus the point at
//! infinity, encoded as index q.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::poly::Poly;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatFnError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("numerator is the zero polynomial")]
    ZeroNumerator,
    #[error("permutations are over different point counts")]
    SizeMismatch,
    #[error("malformed rational function text: {0}")]
    Parse(String),
}

/// A point of P^1(F_q): a field label, or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum P1Point {
    Finite(FieldElem),
    Infinity,
}

impl P1Point {
    pub const INF: P1Point = P1Point::Infinity;

    pub fn finite(label: u16) -> P1Point {
        P1Point::Finite(FieldElem(label))
    }

    /// Array index: labels map to themselves, infinity to q.
    pub fn index(self, q: u32) -> usize {
        match self {
            P1Point::Finite(a) => a.0 as usize,
            P1Point::Infinity => q as usize,
        }
    }

    pub fn from_index(i: usize, q: u32) -> P1Point {
        if i == q as usize {
            P1Point::Infinity
        } else {
            P1Point::Finite(FieldElem(i as u16))
        }
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(a) => write!(f, "{}", a.0),
            P1Point::Infinity => write!(f, "inf"),
        }
    }
}

/// A rational function in canonical reduced form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    /// Canonicalizes num/den: divides out the gcd and rescales so the
    /// denominator is monic.
    pub fn new(ctx: &FieldCtx, num: Poly, den: Poly) -> Result<RatFn, RatFnError> {
        if den.is_zero() {
            return Err(RatFnError::ZeroDenominator);
        }
        let (mut num, mut den) = (num, den);
        if !num.is_zero() {
            let g = num.gcd(ctx, &den).expect("den nonzero");
            if g.degree() != Some(0) {
                num = num.divrem(ctx, &g).0;
                den = den.divrem(ctx, &g).0;
            }
        }
        let lead = den.leading();
        if lead != FieldElem::ONE {
            let s = ctx.inv(lead).expect("den nonzero");
            num = num.scalar_mul(ctx, s);
            den = den.scalar_mul(ctx, s);
        }
        Ok(RatFn { num, den })
    }

    /// Wraps parts the caller guarantees are already canonical (coprime,
    /// monic denominator); used by the census hot loops.
    pub(crate) fn from_canonical_parts(num: Poly, den: Poly) -> RatFn {
        debug_assert!(den.is_monic());
        RatFn { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Effective degrees (v, u) after reduction; the zero numerator
    /// reports v = 0.
    pub fn shape(&self) -> (usize, usize) {
        (
            self.num.degree().unwrap_or(0),
            self.den.degree().expect("den nonzero"),
        )
    }

    /// Evaluates at a point of P^1, honoring the conventions at infinity:
    /// a nonzero value over a zero denominator is infinity, and the value
    /// at infinity is infinity / zero / the ratio of leading coefficients
    /// according to whether v > u, v < u, or v = u.
    pub fn eval_p1(&self, ctx: &FieldCtx, x: P1Point) -> P1Point {
        match x {
            P1Point::Finite(a) => {
                let dv = self.den.eval(ctx, a);
                if dv.is_zero() {
                    P1Point::Infinity
                } else {
                    let nv = self.num.eval(ctx, a);
                    P1Point::Finite(ctx.div(nv, dv).expect("dv nonzero"))
                }
            }
            P1Point::Infinity => {
                let (v, u) = self.shape();
                if self.num.is_zero() || v < u {
                    P1Point::Finite(FieldElem::ZERO)
                } else if v > u {
                    P1Point::Infinity
                } else {
                    let r = ctx
                        .div(self.num.leading(), self.den.leading())
                        .expect("den leading nonzero");
                    P1Point::Finite(r)
                }
            }
        }
    }

    /// U/V for a nonzero numerator, in canonical form.
    pub fn reciprocal(&self, ctx: &FieldCtx) -> Result<RatFn, RatFnError> {
        if self.num.is_zero() {
            return Err(RatFnError::ZeroNumerator);
        }
        RatFn::new(ctx, self.den.clone(), self.num.clone())
    }

    /// W(1/x): substitutes 1/x and clears powers of x, i.e. the
    /// composition of W with the inversion of P^1.
    pub fn invert_arg(&self, ctx: &FieldCtx) -> RatFn {
        let n = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        let reverse = |p: &Poly| {
            let mut coeffs = vec![FieldElem::ZERO; n + 1];
            for (i, &c) in p.coeffs().iter().enumerate() {
                coeffs[n - i] = c;
            }
            Poly::from_coeffs(coeffs)
        };
        RatFn::new(ctx, reverse(&self.num), reverse(&self.den)).expect("den stays nonzero")
    }

    /// Evaluates at all q+1 points; returns the permutation, or the first
    /// colliding domain pair. Non-permutation is a result, not an error.
    pub fn to_perm(&self, ctx: &FieldCtx) -> PermOutcome {
        let q = ctx.q;
        let mut image = vec![u16::MAX; q as usize + 1];
        let mut preimage = vec![u16::MAX; q as usize + 1];
        for i in 0..=q as usize {
            let x = P1Point::from_index(i, q);
            let y = self.eval_p1(ctx, x).index(q);
            if preimage[y] != u16::MAX {
                return PermOutcome::NotPermutation {
                    x1: P1Point::from_index(preimage[y] as usize, q),
                    x2: x,
                };
            }
            preimage[y] = i as u16;
            image[i] = y as u16;
        }
        PermOutcome::Perm(PermP1 { q, image })
    }

    /// Text form "num|den" with comma-separated coefficient labels.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<RatFn, RatFnError> {
        let (n, d) = s
            .split_once('|')
            .ok_or_else(|| RatFnError::Parse(format!("missing '|' in {s:?}")))?;
        let num = Poly::parse(n).map_err(|e| RatFnError::Parse(e.to_string()))?;
        let den = Poly::parse(d).map_err(|e| RatFnError::Parse(e.to_string()))?;
        RatFn::new(ctx, num, den)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.num, self.den)
    }
}

/// Result of [`RatFn::to_perm`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermOutcome {
    Perm(PermP1),
    /// Two domain points with the same image.
    NotPermutation { x1: P1Point, x2: P1Point },
}

impl PermOutcome {
    pub fn ok(self) -> Option<PermP1> {
        match self {
            PermOutcome::Perm(p) => Some(p),
            PermOutcome::NotPermutation { .. } => None,
        }
    }
}

/// A permutation of the q+1 points of P^1(F_q); `image[i]` is the image
/// of point i, with index q standing for infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermP1 {
    q: u32,
    image: Vec<u16>,
}

impl PermP1 {
    pub fn from_image(q: u32, image: Vec<u16>) -> Option<PermP1> {
        if image.len() != q as usize + 1 {
            return None;
        }
        let mut seen = vec![false; q as usize + 1];
        for &y in &image {
            if y as usize > q as usize || seen[y as usize] {
                return None;
            }
            seen[y as usize] = true;
        }
        Some(PermP1 { q, image })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn image(&self) -> &[u16] {
        &self.image
    }

    pub fn apply(&self, x: P1Point) -> P1Point {
        P1Point::from_index(self.image[x.index(self.q)] as usize, self.q)
    }

    pub fn identity(q: u32) -> PermP1 {
        PermP1 {
            q,
            image: (0..=q as u16).collect(),
        }
    }

    /// Hamming distance: the number of points where the images differ.
    pub fn hamming(&self, other: &PermP1) -> Result<u32, RatFnError> {
        if self.q != other.q {
            return Err(RatFnError::SizeMismatch);
        }
        Ok(self
            .image
            .iter()
            .zip(&other.image)
            .filter(|(a, b)| a != b)
            .count() as u32)
    }

    /// Contraction to a permutation of F_q: drop the infinity coordinate,
    /// first swapping the symbol at infinity into the preimage-of-infinity
    /// slot when infinity is not a fixed point.
    pub fn contract(&self) -> PermFq {
        let q = self.q as usize;
        let mut image: Vec<u16> = self.image[..q].to_vec();
        let at_inf = self.image[q];
        if at_inf != q as u16 {
            let i = self
                .image
                .iter()
                .position(|&y| y == q as u16)
                .expect("bijection");
            image[i] = at_inf;
        }
        PermFq {
            q: self.q,
            image,
        }
    }
}

impl fmt::Display for PermP1 {
    /// Space-separated symbols, infinity written "inf".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .image
            .iter()
            .map(|&y| {
                if y as u32 == self.q {
                    "inf".to_string()
                } else {
                    y.to_string()
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A permutation of the q elements of F_q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermFq {
    q: u32,
    image: Vec<u16>,
}

impl PermFq {
    pub fn from_image(q: u32, image: Vec<u16>) -> Option<PermFq> {
        if image.len() != q as usize {
            return None;
        }
        let mut seen = vec![false; q as usize];
        for &y in &image {
            if y as u32 >= q || seen[y as usize] {
                return None;
            }
            seen[y as usize] = true;
        }
        Some(PermFq { q, image })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn image(&self) -> &[u16] {
        &self.image
    }

    pub fn hamming(&self, other: &PermFq) -> Result<u32, RatFnError> {
        if self.q != other.q {
            return Err(RatFnError::SizeMismatch);
        }
        Ok(self
            .image
            .iter()
            .zip(&other.image)
            .filter(|(a, b)| a != b)
            .count() as u32)
    }
}

impl fmt::Display for PermFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(|y| y.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, FieldSpec};

    fn f7() -> FieldCtx {
        build_field(&FieldSpec::new(7, 1, vec![4, 1])).unwrap()
    }

    /// The running example W = (x^3+x)/(x^2+5) over F_7 (labels).
    fn w_example(ctx: &FieldCtx) -> RatFn {
        RatFn::parse(ctx, "0,1,0,1|5,0,1").unwrap()
    }

    #[test]
    fn canonical_form_reduces() {
        let ctx = f7();
        // (2x^2+2x)/(x+1) reduces to 2x/1, shape (1,0).
        // Field 2 = t^2 = label 3 under t=3.
        let num = Poly::from_labels(&[0, 3, 3]);
        let den = Poly::from_labels(&[1, 1]);
        let w = RatFn::new(&ctx, num, den).unwrap();
        assert_eq!(w.shape(), (1, 0));
        assert_eq!(w.den(), &Poly::one());
        assert_eq!(w.num(), &Poly::from_labels(&[0, 3]));
    }

    #[test]
    fn zero_denominator_rejected() {
        let ctx = f7();
        assert_eq!(
            RatFn::new(&ctx, Poly::one(), Poly::zero()),
            Err(RatFnError::ZeroDenominator)
        );
    }

    #[test]
    fn worked_example_permutation() {
        let ctx = f7();
        let w = w_example(&ctx);
        assert_eq!(w.shape(), (3, 2));
        assert_eq!(w.eval_p1(&ctx, P1Point::finite(3)), P1Point::finite(2));
        assert_eq!(w.eval_p1(&ctx, P1Point::INF), P1Point::INF);
        let perm = w.to_perm(&ctx).ok().expect("is a PRF");
        assert_eq!(perm.image(), &[0, 4, 6, 2, 1, 3, 5, 7]);
        assert_eq!(perm.to_string(), "0 4 6 2 1 3 5 inf");
    }

    #[test]
    fn reciprocal_of_worked_example() {
        let ctx = f7();
        let w = w_example(&ctx);
        // U/V sends x to 1/W(x), still a PRF, with v < u so infinity -> 0.
        let r = w.reciprocal(&ctx).unwrap();
        assert_eq!(r.eval_p1(&ctx, P1Point::INF), P1Point::finite(0));
        assert!(r.to_perm(&ctx).ok().is_some());
        // W(1/x) gives the second permutation row of the running example.
        let wi = w.invert_arg(&ctx);
        let perm = wi.to_perm(&ctx).ok().expect("W(1/x) is a PRF");
        assert_eq!(perm.image(), &[7, 4, 5, 3, 1, 2, 6, 0]);
    }

    #[test]
    fn squares_collide() {
        let ctx = f7();
        let w = RatFn::parse(&ctx, "0,0,1|1").unwrap();
        match w.to_perm(&ctx) {
            PermOutcome::NotPermutation { x1, x2 } => assert_ne!(x1, x2),
            PermOutcome::Perm(_) => panic!("x^2 is not a PRF in odd characteristic"),
        }
    }

    #[test]
    fn reciprocal_involution() {
        let ctx = f7();
        let w = w_example(&ctx);
        let r = w.reciprocal(&ctx).unwrap().reciprocal(&ctx).unwrap();
        assert_eq!(r, w);
        // 1/x permutes P^1 for every q.
        let inv = RatFn::parse(&ctx, "1|0,1").unwrap();
        assert!(inv.to_perm(&ctx).ok().is_some());
    }

    #[test]
    fn hamming_and_contract() {
        let ctx = f7();
        let w = w_example(&ctx);
        let perm = w.to_perm(&ctx).ok().unwrap();
        let id = PermP1::identity(7);
        assert_eq!(perm.hamming(&perm).unwrap(), 0);
        // Agrees with the identity at 0 and at infinity only.
        assert_eq!(perm.hamming(&id).unwrap(), 6);
        // Fixed point at infinity: contraction just drops the coordinate.
        assert_eq!(perm.contract().image(), &[0, 4, 6, 2, 1, 3, 5]);
        // Swap rule on the W(1/x) permutation (infinity maps to 0).
        let rperm = w.invert_arg(&ctx).to_perm(&ctx).ok().unwrap();
        assert_eq!(rperm.contract().image(), &[0, 4, 5, 3, 1, 2, 6]);
        // Identity contracts to identity.
        assert_eq!(id.contract().image(), &[0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn text_roundtrip() {
        let ctx = f7();
        let w = w_example(&ctx);
        assert_eq!(w.to_string(), "0,1,0,1|5,0,1");
        assert_eq!(RatFn::parse(&ctx, &w.to_string()).unwrap(), w);
        assert!(RatFn::parse(&ctx, "0,1,0,1").is_err());
    }

    #[test]
    fn eval_at_infinity_equal_degrees() {
        let ctx = f7();
        // (2x+1)/(x+3): value at infinity is the leading ratio 2/1 = label 3.
        let w = RatFn::parse(&ctx, "1,3|3,1").unwrap();
        assert_eq!(w.eval_p1(&ctx, P1Point::INF), P1Point::finite(3));
    }
}
