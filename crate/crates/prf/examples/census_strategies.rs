//! Counting N_{v,u}(q) with every strategy and comparing the results:
//! brute force, normalized enumeration, the v=u monic strategy, and the
//! closed forms.

use prf::census::{self, CensusOptions, FormulaResult, Strategy};
use prf::field::{build_field, FieldSpec};

fn main() {
    let ctx = build_field(&FieldSpec::with_default_poly(5, 1).unwrap()).unwrap();
    let opts = CensusOptions::default();

    // Shape (3,2): the brute oracle and the normalized strategy agree,
    // and both match q^2(q-1)^2/2.
    let brute = census::count_brute(&ctx, 3, 2, &opts).unwrap();
    let norm = census::count_normalized(&ctx, 3, 2, &opts).unwrap();
    println!(
        "N_3,2(5): brute {} ({}) | normalized {} ({})",
        brute.count,
        brute.shard_info.as_deref().unwrap_or(""),
        norm.count,
        norm.shard_info.as_deref().unwrap_or(""),
    );
    if let FormulaResult::Exact(n) = census::formula(5, 3, 2, false) {
        println!("closed form: {n}");
    }

    // Equal degrees: monic/monic candidates times q-1.
    let eq = census::count_equal_degree(&ctx, 3, &opts).unwrap();
    println!("N_3,3(5) via monic-equal: {}", eq.count);

    // The dispatcher applies reciprocal symmetry for v < u.
    let rec = census::count(&ctx, 2, 3, Strategy::Auto, &opts).unwrap();
    println!("N_2,3(5) via {}: {}", rec.strategy, rec.count);

    // Shape (1,1) counts the whole fractional-linear family, q^3 - q.
    let moebius = census::count(&ctx, 1, 1, Strategy::Auto, &opts).unwrap();
    println!("N_1,1(5) (fractional-linear family): {}", moebius.count);

    // Records serialize with the count as a decimal string.
    println!("record: {}", serde_json::to_string(&brute).unwrap());
}
