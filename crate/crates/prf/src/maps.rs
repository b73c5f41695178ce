//! The F-map and G-map on polynomials and rational functions.
//!
//! The F-map multiplies the coefficient of x^{v−k} by t^k (t the field
//! generator), which equals t^v·V(x/t); on a rational function it acts on
//! numerator and denominator separately and equals t^{v−u}·W(x/t)
//! pointwise. It is a bijection on normalized PRFs, so counting can be
//! stratified by the value of the subleading coefficient.
//!
//! The G-map raises every coefficient to the p-th power (Frobenius on
//! coefficients); it maps PRFs to PRFs and partitions them into orbits
//! whose sizes divide the extension degree m.

use crate::field::FieldCtx;
use crate::poly::Poly;
use crate::ratfunc::RatFn;

/// Which generating map an orbit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    F,
    G,
}

/// F(V): coefficient of x^{v−k} multiplied by t^k.
pub fn f_map_poly(ctx: &FieldCtx, f: &Poly) -> Poly {
    let Some(v) = f.degree() else {
        return Poly::zero();
    };
    let t = ctx.generator();
    let coeffs = (0..=v)
        .map(|i| ctx.mul(f.coeff(i), ctx.pow(t, (v - i) as i64)))
        .collect();
    Poly::from_coeffs(coeffs)
}

/// F(W) = F(V)/F(U), each part scaled relative to its own degree.
pub fn f_map(ctx: &FieldCtx, w: &RatFn) -> RatFn {
    RatFn::new(ctx, f_map_poly(ctx, w.num()), f_map_poly(ctx, w.den()))
        .expect("denominator keeps its degree")
}

/// G(V): every coefficient replaced by its p-th power.
pub fn g_map_poly(ctx: &FieldCtx, f: &Poly) -> Poly {
    Poly::from_coeffs(f.coeffs().iter().map(|&c| ctx.frobenius(c)).collect())
}

/// G(W) = G(V)/G(U).
pub fn g_map(ctx: &FieldCtx, w: &RatFn) -> RatFn {
    RatFn::new(ctx, g_map_poly(ctx, w.num()), g_map_poly(ctx, w.den()))
        .expect("denominator keeps its degree")
}

/// An orbit under repeated application of one map: member i maps to
/// member i+1 cyclically, and all members are distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub kind: MapKind,
    pub members: Vec<RatFn>,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Iterates the chosen map from w until it returns to w.
pub fn orbit(ctx: &FieldCtx, w: &RatFn, kind: MapKind) -> Orbit {
    let step = |x: &RatFn| match kind {
        MapKind::F => f_map(ctx, x),
        MapKind::G => g_map(ctx, x),
    };
    let mut members = vec![w.clone()];
    let mut cur = step(w);
    while &cur != w {
        members.push(cur.clone());
        cur = step(&cur);
        // F-orbits divide q-1 and G-orbits divide m; guard regardless.
        assert!(
            members.len() <= ctx.q as usize,
            "orbit failed to close; map is not acting bijectively"
        );
    }
    Orbit { kind, members }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_field, FieldSpec};
    use crate::ratfunc::{P1Point, PermOutcome};

    fn f7() -> FieldCtx {
        build_field(&FieldSpec::new(7, 1, vec![4, 1])).unwrap()
    }

    fn gf8() -> FieldCtx {
        build_field(&FieldSpec::new(2, 3, vec![1, 0, 1, 1])).unwrap()
    }

    #[test]
    fn f_map_poly_example() {
        let ctx = f7();
        // x³+x: coefficient of x (k = 2) is multiplied by t², label 3.
        let f = Poly::from_labels(&[0, 1, 0, 1]);
        assert_eq!(f_map_poly(&ctx, &f), Poly::from_labels(&[0, 3, 0, 1]));
        // Monomials are fixed.
        let m = Poly::from_labels(&[0, 0, 0, 1]);
        assert_eq!(f_map_poly(&ctx, &m), m);
    }

    #[test]
    fn f_map_iterated_q_minus_1_is_identity() {
        let ctx = f7();
        let f = Poly::from_labels(&[2, 5, 0, 1]);
        let mut g = f.clone();
        for _ in 0..6 {
            g = f_map_poly(&ctx, &g);
        }
        assert_eq!(g, f);
    }

    #[test]
    fn f_map_equals_scaled_substitution() {
        // F(V) = t^v · V(x/t), checked pointwise.
        for ctx in [f7(), gf8()] {
            let t = ctx.generator();
            let t_inv = ctx.inv(t).unwrap();
            let f = Poly::from_labels(&[3 % ctx.q as u16, 1, 5 % ctx.q as u16, 1]);
            let v = f.degree().unwrap() as i64;
            let g = f_map_poly(&ctx, &f);
            for x in ctx.elems() {
                let expect = ctx.mul(ctx.pow(t, v), f.eval(&ctx, ctx.mul(x, t_inv)));
                assert_eq!(g.eval(&ctx, x), expect);
            }
        }
    }

    #[test]
    fn f_map_pointwise_law_on_ratfn() {
        let ctx = f7();
        let w = RatFn::parse(&ctx, "0,1,0,1|5,0,1").unwrap();
        let fw = f_map(&ctx, &w);
        let (v, u) = w.shape();
        let t = ctx.generator();
        let t_inv = ctx.inv(t).unwrap();
        let scale = ctx.pow(t, (v - u) as i64);
        for x in ctx.elems() {
            let lhs = fw.eval_p1(&ctx, P1Point::Finite(x));
            let rhs = match w.eval_p1(&ctx, P1Point::Finite(ctx.mul(x, t_inv))) {
                P1Point::Finite(y) => P1Point::Finite(ctx.mul(scale, y)),
                P1Point::Infinity => P1Point::Infinity,
            };
            assert_eq!(lhs, rhs);
        }
        // PRF-ness and C-normalization are preserved.
        assert!(fw.to_perm(&ctx).ok().is_some());
        assert!(crate::normalize::is_normalized(
            &ctx,
            &fw,
            crate::normalize::NormKind::C
        ));
    }

    #[test]
    fn g_orbit_gf8_example() {
        let ctx = gf8();
        // W = (x³+x²+2x)/(x²+4x+1) in labels; its G-orbit has size 3 with
        // the coefficient rows below.
        let w = RatFn::parse(&ctx, "0,2,1,1|1,4,1").unwrap();
        assert!(w.to_perm(&ctx).ok().is_some());
        let o = orbit(&ctx, &w, MapKind::G);
        assert_eq!(o.size(), 3);
        assert_eq!(o.members[1].to_string(), "0,3,1,1|1,7,1");
        assert_eq!(o.members[2].to_string(), "0,5,1,1|1,6,1");
        for m in &o.members {
            assert!(m.to_perm(&ctx).ok().is_some());
        }
    }

    #[test]
    fn g_map_identity_on_prime_fields() {
        let ctx = f7();
        let w = RatFn::parse(&ctx, "0,1,0,1|5,0,1").unwrap();
        assert_eq!(g_map(&ctx, &w), w);
        assert_eq!(orbit(&ctx, &w, MapKind::G).size(), 1);
    }

    #[test]
    fn g_map_pointwise_law() {
        // eval(G(W), x^p) = eval(W, x)^p over all points.
        for ctx in [f7(), gf8()] {
            let w = RatFn::parse(&ctx, "0,2,1,1|1,4,1").unwrap();
            let gw = g_map(&ctx, &w);
            for x in ctx.elems() {
                let lhs = gw.eval_p1(&ctx, P1Point::Finite(ctx.frobenius(x)));
                let rhs = match w.eval_p1(&ctx, P1Point::Finite(x)) {
                    P1Point::Finite(y) => P1Point::Finite(ctx.frobenius(y)),
                    P1Point::Infinity => P1Point::Infinity,
                };
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn g_commutes_with_prf_ness() {
        let ctx = gf8();
        let prf = RatFn::parse(&ctx, "0,2,1,1|1,4,1").unwrap();
        // x²+x collapses 0 and 1, and stays collapsed under G.
        let not_prf = RatFn::parse(&ctx, "0,1,1|1").unwrap();
        assert!(matches!(g_map(&ctx, &prf).to_perm(&ctx), PermOutcome::Perm(_)));
        assert!(g_map(&ctx, &not_prf).to_perm(&ctx).ok().is_none());
    }

    #[test]
    fn f_orbit_size_divides_q_minus_1() {
        let ctx = f7();
        for s in ["0,1,0,1|5,0,1", "0,3,0,1|5,0,1", "0,0,0,1|5,0,1"] {
            let w = RatFn::parse(&ctx, s).unwrap();
            let o = orbit(&ctx, &w, MapKind::F);
            assert_eq!((ctx.q as usize - 1) % o.size(), 0);
        }
    }
}
