//! The F_7 worked example: a degree-(3,2) PRF, its permutation of the
//! projective line, argument inversion, and contraction to F_7.

use prf::field::{build_field, FieldSpec};
use prf::ratfunc::{P1Point, PermOutcome, RatFn};

fn main() {
    // F_7 with primitive polynomial x + 4, so the generator is t = 3.
    let ctx = build_field(&FieldSpec::new(7, 1, vec![4, 1])).unwrap();
    println!("field: q = {}, generator label {}", ctx.q, ctx.generator().0);

    // W = (x^3 + x) / (x^2 + 5), written constant-term first.
    let w = RatFn::parse(&ctx, "0,1,0,1|5,0,1").unwrap();
    println!("W = {w}  shape {:?}", w.shape());

    let PermOutcome::Perm(p) = w.to_perm(&ctx) else {
        panic!("W is a PRF");
    };
    println!("W as a permutation of P^1: {p}");

    // Argument inversion W(1/x) is again a PRF with a different row.
    let winv = w.invert_arg(&ctx);
    let PermOutcome::Perm(pinv) = winv.to_perm(&ctx) else {
        panic!("W(1/x) is a PRF");
    };
    println!("W(1/x) = {winv} as a permutation: {pinv}");

    println!(
        "Hamming distance between the two rows: {}",
        p.hamming(&pinv).unwrap()
    );

    // Contraction drops the infinity coordinate to get rows on q symbols.
    println!("contract(W):      {}", p.contract());
    println!("contract(W(1/x)): {}", pinv.contract());

    // Spot evaluations, including the points at infinity.
    for x in [P1Point::Finite(prf::field::FieldElem(0)), P1Point::INF] {
        println!("W({x}) = {}", w.eval_p1(&ctx, x));
    }
}
