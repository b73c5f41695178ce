//! Normalization of PRFs with numerator degree v exceeding denominator
//! degree u.
//!
//! The transforms a·W(x+b)+c (a nonzero) preserve PRF-ness and partition
//! the shape-(v,u) PRFs into classes of q²(q−1) members. Every class
//! contains a representative with monic numerator and denominator and
//! zero numerator constant term, plus one kind-specific zero coefficient:
//!
//! - kind C (p ∤ u): denominator coefficient b_{u−1} = 0 — the
//!   representative is unique;
//! - kind M (p | u, p > 2): b_{u−1} = 0 or b_{u−2} = 0;
//! - kind B (p = 2, 2 | u, with 2^i ≤ u ≤ 2^{i+1}−3 and r = 2^i−1):
//!   b_r = 0 or b_{r−1} = 0, via the gap in (x+b)^d expansions for d in
//!   that range; degrees u = 2^i−2 are the exceptional case with no such
//!   guarantee.
//!
//! For polynomial shapes (u = 0) the same machinery applies with the
//! kind-specific zero condition moved to the numerator coefficients.

use thiserror::Error;

use crate::field::{FieldCtx, FieldElem};
use crate::poly::Poly;
use crate::ratfunc::RatFn;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("shape ({v},{u}) over GF({q}) is {kind:?}-normalizable, not {requested:?}")]
    KindMismatch {
        q: u32,
        v: usize,
        u: usize,
        kind: Classification,
        requested: NormKind,
    },
    #[error("witness scalars y and z must be nonzero")]
    ZeroScalar,
    #[error("input is not a PRF: its denominator vanishes at the chosen shift")]
    DenominatorRoot,
    #[error("class_members requires a c-normalized base")]
    BaseNotNormalized,
}

/// The three normalization kinds of the v > u theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// p does not divide the target degree; unique representative.
    C,
    /// p divides the target degree, p odd.
    M,
    /// Characteristic 2, target degree even and inside a gap range.
    B,
}

/// Why a shape has no applicable normalization kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotNormalizableReason {
    /// v ≤ u: the theory requires a strictly larger numerator degree.
    NumeratorNotLarger,
    /// Characteristic 2 with target degree 2^i − 2: the gap argument
    /// does not apply.
    ExceptionalDegree,
    /// Characteristic 2 with extension degree m ≤ 2: the gap theorem
    /// requires m > 2.
    SmallField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Kind(NormKind),
    NotNormalizable(NotNormalizableReason),
}

impl Classification {
    pub fn kind(self) -> Option<NormKind> {
        match self {
            Classification::Kind(k) => Some(k),
            Classification::NotNormalizable(_) => None,
        }
    }
}

/// Which polynomial carries the kind-specific zero coefficient: the
/// denominator for u ≥ 1, the numerator for polynomial shapes (u = 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormTarget {
    Den,
    Num,
}

/// The target polynomial and its degree for a shape (v, u).
pub fn norm_target(v: usize, u: usize) -> (NormTarget, usize) {
    if u == 0 {
        (NormTarget::Num, v)
    } else {
        (NormTarget::Den, u)
    }
}

/// For even d in characteristic 2: `Some(r)` with r = 2^i − 1 when
/// 2^i ≤ d ≤ 2^{i+1} − 3, `None` when d = 2^{i+1} − 2 (exceptional).
pub fn gap_low_coeff(d: usize) -> Option<usize> {
    debug_assert!(d >= 2 && d % 2 == 0);
    let lo = 1usize << d.ilog2();
    if d <= 2 * lo - 3 {
        Some(lo - 1)
    } else {
        None
    }
}

/// Determines the normalization kind applicable to shape (v, u).
pub fn classify(ctx: &FieldCtx, v: usize, u: usize) -> Classification {
    if v <= u {
        return Classification::NotNormalizable(NotNormalizableReason::NumeratorNotLarger);
    }
    let (_, d) = norm_target(v, u);
    let p = ctx.spec.p as usize;
    if d % p != 0 {
        Classification::Kind(NormKind::C)
    } else if p > 2 {
        Classification::Kind(NormKind::M)
    } else if gap_low_coeff(d).is_none() {
        Classification::NotNormalizable(NotNormalizableReason::ExceptionalDegree)
    } else if ctx.spec.m <= 2 {
        Classification::NotNormalizable(NotNormalizableReason::SmallField)
    } else {
        Classification::Kind(NormKind::B)
    }
}

/// The transform parameters: W ↦ (yV(x+b) + czU(x+b)) / (zU(x+b)),
/// i.e. a·W(x+b)+c with a = y/z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormWitness {
    pub y: FieldElem,
    pub z: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
}

impl NormWitness {
    pub fn identity() -> NormWitness {
        NormWitness {
            y: FieldElem::ONE,
            z: FieldElem::ONE,
            b: FieldElem::ZERO,
            c: FieldElem::ZERO,
        }
    }

    /// The collapsed scalar a = y/z of the (a, b, c) triple.
    pub fn a(&self, ctx: &FieldCtx) -> FieldElem {
        ctx.div(self.y, self.z).expect("z nonzero")
    }

    /// The witness undoing this one: applying both in sequence is the
    /// identity transform.
    pub fn inverse(&self, ctx: &FieldCtx) -> NormWitness {
        let a_inv = ctx.div(self.z, self.y).expect("y nonzero");
        NormWitness {
            y: self.z,
            z: self.y,
            b: ctx.neg(self.b),
            c: ctx.neg(ctx.mul(a_inv, self.c)),
        }
    }
}

/// Applies a·W(x+b)+c in the (y,z,b,c) form, returning canonical form.
pub fn apply_witness(ctx: &FieldCtx, w: &RatFn, nw: &NormWitness) -> Result<RatFn, NormalizeError> {
    if nw.y.is_zero() || nw.z.is_zero() {
        return Err(NormalizeError::ZeroScalar);
    }
    let num_s = w.num().shift_arg(ctx, nw.b);
    let den_s = w.den().shift_arg(ctx, nw.b);
    let num = num_s
        .scalar_mul(ctx, nw.y)
        .add(ctx, &den_s.scalar_mul(ctx, ctx.mul(nw.c, nw.z)));
    let den = den_s.scalar_mul(ctx, nw.z);
    Ok(RatFn::new(ctx, num, den).expect("den nonzero"))
}

/// Checks the full normalization predicate for the given kind: monic
/// numerator and denominator, zero numerator constant term, and the
/// kind-specific zero coefficient on the target polynomial.
pub fn is_normalized(_ctx: &FieldCtx, w: &RatFn, kind: NormKind) -> bool {
    let (v, u) = w.shape();
    if w.num().is_zero() || v <= u {
        return false;
    }
    if !w.num().is_monic() || !w.den().is_monic() {
        return false;
    }
    if !w.num().coeff(0).is_zero() {
        return false;
    }
    let (target, d) = norm_target(v, u);
    let t = match target {
        NormTarget::Den => w.den(),
        NormTarget::Num => w.num(),
    };
    match kind {
        NormKind::C => t.coeff(d - 1).is_zero(),
        NormKind::M => t.coeff(d - 1).is_zero() || (d >= 2 && t.coeff(d - 2).is_zero()),
        NormKind::B => match gap_low_coeff(d) {
            Some(r) => t.coeff(r).is_zero() || t.coeff(r - 1).is_zero(),
            None => false,
        },
    }
}

fn expect_kind(
    ctx: &FieldCtx,
    w: &RatFn,
    requested: NormKind,
) -> Result<(usize, usize), NormalizeError> {
    let (v, u) = w.shape();
    let kind = classify(ctx, v, u);
    if kind != Classification::Kind(requested) {
        return Err(NormalizeError::KindMismatch {
            q: ctx.q,
            v,
            u,
            kind,
            requested,
        });
    }
    Ok((v, u))
}

/// Finishes a normalization once the shift b is chosen: makes both parts
/// monic and adds the constant c that zeroes the numerator at 0.
fn finish(ctx: &FieldCtx, w: &RatFn, b: FieldElem) -> Result<(RatFn, NormWitness), NormalizeError> {
    let num_s = w.num().shift_arg(ctx, b);
    let den_s = w.den().shift_arg(ctx, b);
    let y = ctx.inv(num_s.leading()).expect("nonzero leading");
    let z = ctx.inv(den_s.leading()).expect("nonzero leading");
    let num_m = num_s.scalar_mul(ctx, y);
    let den_m = den_s.scalar_mul(ctx, z);
    let d0 = den_m.coeff(0);
    if d0.is_zero() {
        // A PRF with v > u has a root-free denominator; reaching this
        // means the input was not a PRF.
        return Err(NormalizeError::DenominatorRoot);
    }
    let c = ctx.neg(ctx.div(num_m.coeff(0), d0).expect("d0 nonzero"));
    let nw = NormWitness { y, z, b, c };
    let out = apply_witness(ctx, w, &nw)?;
    Ok((out, nw))
}

fn target_poly<'a>(w: &'a RatFn, target: NormTarget) -> &'a Poly {
    match target {
        NormTarget::Den => w.den(),
        NormTarget::Num => w.num(),
    }
}

/// c-normalization: returns the unique class representative and the
/// witness mapping the input to it.
pub fn c_normalize(ctx: &FieldCtx, w: &RatFn) -> Result<(RatFn, NormWitness), NormalizeError> {
    let (v, u) = expect_kind(ctx, w, NormKind::C)?;
    let (target, d) = norm_target(v, u);
    let t = target_poly(w, target);
    // Coefficient d-1 of t(x+b) is d·t_d·b + t_{d-1}; solve it to zero.
    let d_elem = int_to_elem(ctx, d as u64);
    let denom = ctx.mul(d_elem, t.leading());
    let b = ctx.neg(ctx.div(t.coeff(d - 1), denom).expect("p does not divide d"));
    finish(ctx, w, b)
}

/// m-normalization: zero b_{u−1} is kept when already present (shift 0);
/// otherwise the shift zeroing b_{u−2} is applied.
pub fn m_normalize(ctx: &FieldCtx, w: &RatFn) -> Result<(RatFn, NormWitness), NormalizeError> {
    let (v, u) = expect_kind(ctx, w, NormKind::M)?;
    let (target, d) = norm_target(v, u);
    let t = target_poly(w, target);
    let b = if t.coeff(d - 1).is_zero() {
        FieldElem::ZERO
    } else {
        // Coefficient d-2 of t(x+b) is (d-1)·t_{d-1}·b + t_{d-2}
        // (the degree-d term contributes only exponents divisible by p).
        let denom = ctx.mul(int_to_elem(ctx, (d - 1) as u64), t.coeff(d - 1));
        ctx.neg(ctx.div(t.coeff(d - 2), denom).expect("nonzero"))
    };
    finish(ctx, w, b)
}

/// b-normalization (characteristic 2): the gap range gives r = 2^i−1;
/// coefficient r of the target is shift-invariant, so it is kept when
/// already zero, otherwise the shift zeroing coefficient r−1 is applied.
pub fn b_normalize(ctx: &FieldCtx, w: &RatFn) -> Result<(RatFn, NormWitness), NormalizeError> {
    let (v, u) = expect_kind(ctx, w, NormKind::B)?;
    let (target, d) = norm_target(v, u);
    let t = target_poly(w, target);
    let r = gap_low_coeff(d).expect("kind B implies in-range degree");
    let b = if t.coeff(r).is_zero() {
        FieldElem::ZERO
    } else {
        // Coefficient r-1 of t(x+b) is t_r·b + t_{r-1}: degrees in
        // [2^i, 2^{i+1}-3] contribute nothing there by the gap, and
        // C(r,1) = r is odd.
        ctx.div(t.coeff(r - 1), t.coeff(r)).expect("t_r nonzero")
    };
    finish(ctx, w, b)
}

/// Normalizes by whichever kind applies to the shape of w.
pub fn normalize(ctx: &FieldCtx, w: &RatFn) -> Result<(RatFn, NormKind, NormWitness), NormalizeError> {
    let (v, u) = w.shape();
    match classify(ctx, v, u) {
        Classification::Kind(NormKind::C) => {
            c_normalize(ctx, w).map(|(r, nw)| (r, NormKind::C, nw))
        }
        Classification::Kind(NormKind::M) => {
            m_normalize(ctx, w).map(|(r, nw)| (r, NormKind::M, nw))
        }
        Classification::Kind(NormKind::B) => {
            b_normalize(ctx, w).map(|(r, nw)| (r, NormKind::B, nw))
        }
        kind => Err(NormalizeError::KindMismatch {
            q: ctx.q,
            v,
            u,
            kind,
            // Reported kind is what classify returned; requested is moot.
            requested: NormKind::C,
        }),
    }
}

/// All q²(q−1) canonical members a·W(x+b)+c of the class of a
/// c-normalized PRF.
pub fn class_members(ctx: &FieldCtx, w_normalized: &RatFn) -> Result<Vec<RatFn>, NormalizeError> {
    if !is_normalized(ctx, w_normalized, NormKind::C) {
        return Err(NormalizeError::BaseNotNormalized);
    }
    Ok(class_of(ctx, w_normalized))
}

/// The canonical forms of a·w(x+b)+c over all a ≠ 0, b, c, in
/// enumeration order (duplicates possible for degenerate classes;
/// callers needing set semantics deduplicate).
pub(crate) fn class_of(ctx: &FieldCtx, w: &RatFn) -> Vec<RatFn> {
    let q = ctx.q as usize;
    let mut out = Vec::with_capacity(q * q * (q - 1));
    for a in 1..ctx.q as u16 {
        for b in 0..ctx.q as u16 {
            for c in 0..ctx.q as u16 {
                let nw = NormWitness {
                    y: FieldElem(a),
                    z: FieldElem::ONE,
                    b: FieldElem(b),
                    c: FieldElem(c),
                };
                out.push(apply_witness(ctx, w, &nw).expect("nonzero scalars"));
            }
        }
    }
    out
}

/// Converts a small integer (e.g. a degree) to its field label via
/// repeated addition of 1 — i.e. the image of the integer in GF(q).
fn int_to_elem(ctx: &FieldCtx, n: u64) -> FieldElem {
    let n = n % ctx.spec.p;
    let mut acc = FieldElem::ZERO;
    for _ in 0..n {
        acc = ctx.add(acc, FieldElem::ONE);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, FieldSpec};
    use std::collections::HashSet;

    fn field(p: u64, m: u32) -> FieldCtx {
        build_field(&FieldSpec::with_default_poly(p, m).unwrap()).unwrap()
    }

    fn f7() -> FieldCtx {
        build_field(&FieldSpec::new(7, 1, vec![4, 1])).unwrap()
    }

    fn w_example(ctx: &FieldCtx) -> RatFn {
        RatFn::parse(ctx, "0,1,0,1|5,0,1").unwrap()
    }

    #[test]
    fn classify_table() {
        assert_eq!(
            classify(&field(23, 1), 4, 3),
            Classification::Kind(NormKind::C)
        );
        assert_eq!(
            classify(&field(3, 1), 4, 3),
            Classification::Kind(NormKind::M)
        );
        assert_eq!(
            classify(&field(2, 4), 4, 2),
            Classification::NotNormalizable(NotNormalizableReason::ExceptionalDegree)
        );
        assert_eq!(
            classify(&field(2, 4), 5, 4),
            Classification::Kind(NormKind::B)
        );
        assert_eq!(
            classify(&field(5, 1), 2, 3),
            Classification::NotNormalizable(NotNormalizableReason::NumeratorNotLarger)
        );
        // Polynomial shapes classify on the numerator degree.
        assert_eq!(
            classify(&field(5, 1), 3, 0),
            Classification::Kind(NormKind::C)
        );
        assert_eq!(
            classify(&field(3, 2), 3, 0),
            Classification::Kind(NormKind::M)
        );
        assert_eq!(
            classify(&field(2, 3), 2, 0),
            Classification::NotNormalizable(NotNormalizableReason::ExceptionalDegree)
        );
    }

    #[test]
    fn gap_ranges() {
        assert_eq!(gap_low_coeff(2), None);
        assert_eq!(gap_low_coeff(4), Some(3));
        assert_eq!(gap_low_coeff(6), None);
        assert_eq!(gap_low_coeff(8), Some(7));
        assert_eq!(gap_low_coeff(12), Some(7));
        assert_eq!(gap_low_coeff(14), None);
        assert_eq!(gap_low_coeff(16), Some(15));
    }

    #[test]
    fn worked_example_is_c_normalized() {
        let ctx = f7();
        let w = w_example(&ctx);
        assert!(is_normalized(&ctx, &w, NormKind::C));
        // b_1 nonzero breaks the condition.
        let bad = RatFn::parse(&ctx, "0,1,0,1|1,1,1").unwrap();
        assert!(!is_normalized(&ctx, &bad, NormKind::C));
        // Nonzero numerator constant term breaks it too.
        let bad2 = RatFn::parse(&ctx, "1,1,0,1|5,0,1").unwrap();
        assert!(!is_normalized(&ctx, &bad2, NormKind::C));
    }

    #[test]
    fn c_normalize_already_normalized() {
        let ctx = f7();
        let w = w_example(&ctx);
        let (out, nw) = c_normalize(&ctx, &w).unwrap();
        assert_eq!(out, w);
        assert_eq!(nw, NormWitness::identity());
    }

    #[test]
    fn c_normalize_roundtrip_over_class() {
        let ctx = field(5, 1);
        // A c-normalized (3,2) PRF over F_5, found by construction:
        // scan normalized candidates until one is a PRF.
        let w = first_normalized_prf(&ctx, 3, 2);
        for member in class_of(&ctx, &w) {
            let (back, nw) = c_normalize(&ctx, &member).unwrap();
            assert_eq!(back, w, "uniqueness of the representative");
            assert_eq!(apply_witness(&ctx, &member, &nw).unwrap(), back);
            // Witness inversion recovers the member.
            assert_eq!(
                apply_witness(&ctx, &back, &nw.inverse(&ctx)).unwrap(),
                member
            );
        }
    }

    /// Scans monic/monic candidates with V(0)=0, b_{u-1}=0 for a PRF.
    fn first_normalized_prf(ctx: &FieldCtx, v: usize, u: usize) -> RatFn {
        let q = ctx.q as u16;
        let mut idx = vec![0u16; v + u - 2];
        loop {
            // numerator: 0, a_1..a_{v-1}, 1; denominator: b_0..b_{u-2}, 0, 1
            let mut num = vec![0u16; v + 1];
            num[v] = 1;
            for k in 1..v {
                num[k] = idx[k - 1];
            }
            let mut den = vec![0u16; u + 1];
            den[u] = 1;
            for k in 0..u - 1 {
                den[k] = idx[v - 1 + k];
            }
            let w = RatFn::new(
                ctx,
                Poly::from_labels(&num),
                Poly::from_labels(&den),
            )
            .unwrap();
            if w.shape() == (v, u) && w.to_perm(ctx).ok().is_some() {
                return w;
            }
            let mut i = 0;
            loop {
                assert!(i < idx.len(), "no normalized PRF of this shape");
                idx[i] += 1;
                if idx[i] < q {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn class_size_and_distinctness() {
        let ctx = field(5, 1);
        let w = first_normalized_prf(&ctx, 3, 2);
        let members = class_members(&ctx, &w).unwrap();
        assert_eq!(members.len(), 100); // q²(q−1) = 25·4
        let set: HashSet<_> = members.iter().collect();
        assert_eq!(set.len(), 100, "members pairwise distinct");
        for m in &members {
            assert!(m.to_perm(&ctx).ok().is_some(), "transforms preserve PRFs");
        }
        assert_eq!(
            class_members(&ctx, &members[5]).unwrap_err(),
            NormalizeError::BaseNotNormalized
        );
    }

    #[test]
    fn apply_witness_pointwise_law() {
        use crate::ratfunc::P1Point;
        let ctx = f7();
        let w = w_example(&ctx);
        let nw = NormWitness {
            y: FieldElem(3),
            z: FieldElem(5),
            b: FieldElem(2),
            c: FieldElem(6),
        };
        let img = apply_witness(&ctx, &w, &nw).unwrap();
        let a = nw.a(&ctx);
        for x in ctx.elems() {
            let shifted = ctx.add(x, nw.b);
            if w.den().eval(&ctx, shifted).is_zero() {
                continue;
            }
            let lhs = img.eval_p1(&ctx, P1Point::Finite(x));
            let base = match w.eval_p1(&ctx, P1Point::Finite(shifted)) {
                P1Point::Finite(y) => y,
                P1Point::Infinity => unreachable!("den nonzero"),
            };
            let rhs = ctx.add(ctx.mul(a, base), nw.c);
            assert_eq!(lhs, P1Point::Finite(rhs));
        }
    }

    #[test]
    fn m_normalize_f9() {
        let ctx = field(3, 2);
        // Build an arbitrary (4,3) PRF over GF(9) by scanning the class
        // transforms of normalized candidates.
        let w = first_normalized_prf(&ctx, 4, 3);
        assert!(is_normalized(&ctx, &w, NormKind::M));
        // Perturb into a general class member with b_2 ≠ 0, then renormalize.
        let nw = NormWitness {
            y: FieldElem(4),
            z: FieldElem::ONE,
            b: FieldElem(3),
            c: FieldElem(7),
        };
        let member = apply_witness(&ctx, &w, &nw).unwrap();
        let (out, witness) = m_normalize(&ctx, &member).unwrap();
        assert!(is_normalized(&ctx, &out, NormKind::M));
        assert_eq!(apply_witness(&ctx, &member, &witness).unwrap(), out);
        // The tie-break prefers b = 0 when b_2 is already zero.
        let (again, w2) = m_normalize(&ctx, &w).unwrap();
        assert!(is_normalized(&ctx, &again, NormKind::M));
        assert_eq!(w2.b, FieldElem::ZERO);
    }

    #[test]
    fn b_normalize_gf8_shape_5_4() {
        // GF(8): shape (5,4) has 2² ≤ 4 ≤ 2³−3, r = 3, and m = 3 > 2.
        let ctx = field(2, 3);
        let w = random_b_prf(&ctx);
        let (out0, w0) = b_normalize(&ctx, &w).unwrap();
        assert!(is_normalized(&ctx, &out0, NormKind::B));
        assert_eq!(apply_witness(&ctx, &w, &w0).unwrap(), out0);
        // Same from a perturbed class member.
        let nw = NormWitness {
            y: FieldElem(6),
            z: FieldElem::ONE,
            b: FieldElem(5),
            c: FieldElem(2),
        };
        let member = apply_witness(&ctx, &w, &nw).unwrap();
        let (out, witness) = b_normalize(&ctx, &member).unwrap();
        assert!(is_normalized(&ctx, &out, NormKind::B));
        assert_eq!(apply_witness(&ctx, &member, &witness).unwrap(), out);
    }

    /// Finds a (5,4) PRF over GF(8) by seeded random search.
    fn random_b_prf(ctx: &FieldCtx) -> RatFn {
        let q = ctx.q as u64;
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) % q
        };
        for _ in 0..5_000_000 {
            let num = Poly::from_labels(&[
                next() as u16,
                next() as u16,
                next() as u16,
                next() as u16,
                next() as u16,
                1,
            ]);
            let den = Poly::from_labels(&[
                next() as u16,
                next() as u16,
                next() as u16,
                next() as u16,
                1,
            ]);
            let w = RatFn::new(ctx, num, den).unwrap();
            if w.shape() == (5, 4) && w.to_perm(ctx).ok().is_some() {
                return w;
            }
        }
        panic!("no (5,4) PRF over GF(8) found");
    }

    #[test]
    fn witness_inverse_is_group_inverse() {
        let ctx = f7();
        let w = w_example(&ctx);
        let nw = NormWitness {
            y: FieldElem(6),
            z: FieldElem(2),
            b: FieldElem(4),
            c: FieldElem(1),
        };
        let there = apply_witness(&ctx, &w, &nw).unwrap();
        let back = apply_witness(&ctx, &there, &nw.inverse(&ctx)).unwrap();
        assert_eq!(back, w);
    }
}
