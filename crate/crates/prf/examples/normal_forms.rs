//! Normalization: classifying shapes, reducing a PRF to its normalized
//! representative, and walking the q^2(q-1)-element equivalence class.

use prf::field::{build_field, FieldSpec};
use prf::normalize::{class_members, classify, normalize, Classification};
use prf::ratfunc::RatFn;

fn main() {
    let ctx = build_field(&FieldSpec::with_default_poly(5, 1).unwrap()).unwrap();

    // Which normalization kind applies to each shape at q = 5?
    for (v, u) in [(3, 2), (5, 0), (4, 3), (2, 1)] {
        match classify(&ctx, v, u) {
            Classification::Kind(k) => println!("shape ({v},{u}): kind {k:?}"),
            Classification::NotNormalizable(r) => println!("shape ({v},{u}): none ({r:?})"),
        }
    }

    // Take a (3,2) PRF and c-normalize it.
    let w = RatFn::parse(&ctx, "1,2,0,3|2,0,1").unwrap();
    let (nw, kind, witness) = normalize(&ctx, &w).unwrap();
    println!("W  = {w}");
    println!("nW = {nw}  (kind {kind:?}, witness {witness:?})");

    // The class of the normalized representative: a*nW(x+b)+c over all
    // a != 0, b, c. For kind C with v >= 2 these are pairwise distinct.
    let members = class_members(&ctx, &nw).unwrap();
    let distinct: std::collections::HashSet<_> = members.iter().collect();
    println!(
        "class size: {} (q^2(q-1) = {})",
        distinct.len(),
        ctx.q as usize * ctx.q as usize * (ctx.q as usize - 1)
    );

    // Normalizing any member returns the same representative.
    let back = normalize(&ctx, &members[17]).unwrap().0;
    println!("member #17 renormalizes to nW: {}", back == nw);
}
