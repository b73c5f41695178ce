//! Building a permutation array from every PRF of the bound casework,
//! writing it to disk, reading it back, and certifying its minimum
//! pairwise Hamming distance.

use prf::bounds::{self, BoundOptions, PermArray, VerifyMode};
use prf::field::{build_field, FieldSpec};

fn main() {
    let ctx = build_field(&FieldSpec::with_default_poly(7, 1).unwrap()).unwrap();
    let opts = BoundOptions::default();

    // S-family array on q = 7 symbols at distance q - d = 2.
    let pa = bounds::build_pa_s(&ctx, 5, &opts).unwrap();
    println!(
        "built: {} rows on {} symbols, claiming distance >= {}",
        pa.rows.len(),
        pa.n,
        pa.min_dist_claim
    );

    let path = std::env::temp_dir().join("prf-example-pa.txt");
    pa.write(&path).unwrap();
    let back = PermArray::read(&path).unwrap();
    assert_eq!(back, pa);
    println!("file roundtrip ok: {}", path.display());

    let rep = bounds::verify_pa(&back, VerifyMode::Exhaustive).unwrap();
    println!(
        "exhaustive check over {} pairs: min distance {:?} (witness {:?})",
        rep.pairs_checked, rep.min_distance, rep.witness
    );
    std::fs::remove_file(&path).ok();
}
