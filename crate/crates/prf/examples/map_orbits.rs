//! The F-map and G-map in action: coefficient scaling by generator
//! powers, Frobenius orbits over GF(8), and the stratified count.

use prf::census::{self, CensusOptions};
use prf::field::{build_field, FieldSpec};
use prf::maps::{f_map, g_map, orbit, MapKind};
use prf::ratfunc::RatFn;

fn main() {
    // GF(8) with primitive polynomial x^3 + x^2 + 1.
    let ctx = build_field(&FieldSpec::new(2, 3, vec![1, 0, 1, 1])).unwrap();

    // A (3,2) PRF whose G-orbit has size 3: each step raises every
    // coefficient to the p-th power.
    let w = RatFn::parse(&ctx, "0,2,1,1|1,4,1").unwrap();
    let o = orbit(&ctx, &w, MapKind::G);
    println!("G-orbit of {w} (size {}):", o.size());
    for m in &o.members {
        println!("  {m}");
    }
    println!("G applied once: {}", g_map(&ctx, &w));

    // F multiplies the coefficient of x^{v-k} by t^k; its orbit sizes
    // divide q-1.
    let fo = orbit(&ctx, &w, MapKind::F);
    println!("F-orbit size: {} (divides q-1 = {})", fo.size(), ctx.q - 1);
    println!("F applied once: {}", f_map(&ctx, &w));

    // The F-map justifies exact stratified counting: the same count
    // with and without stratification.
    let mut opts = CensusOptions::default();
    let plain = census::count_normalized(&ctx, 3, 2, &opts).unwrap().count;
    opts.f_stratify = false;
    let unstrat = census::count_normalized(&ctx, 3, 2, &opts).unwrap().count;
    println!("N_3,2(8) stratified {plain} == plain {unstrat}");
}
