//! Evaluating S_d(q) and T_d(q) with their term ledgers, and emitting a
//! reproduction table.

use prf::bounds::{self, BoundOptions, N11Convention, TableId};
use prf::field::{build_field, FieldSpec};

fn main() {
    let ctx = build_field(&FieldSpec::with_default_poly(7, 1).unwrap()).unwrap();
    let opts = BoundOptions::default();

    let rep = bounds::s_bound(&ctx, 5, &opts).unwrap();
    println!("S_5(7) = {}  (convention {:?})", rep.value, rep.n11);
    for t in &rep.terms {
        println!(
            "  N_{},{} x {:?} = {}  [{}]",
            t.v, t.u, t.multiplier, t.count, t.source
        );
    }

    // The exact-degree convention matches materialized array sizes.
    let mut eopts = BoundOptions::default();
    eopts.n11 = N11Convention::Exact;
    println!(
        "T_5(7) = {} verbatim, {} exact-degree",
        bounds::t_bound(&ctx, 5, &opts).unwrap().value,
        bounds::t_bound(&ctx, 5, &eopts).unwrap().value
    );

    // A small table: S_5 and S_7 for two field orders.
    let rows = bounds::emit_table(TableId::S5S7, &[5, 7], &opts).unwrap();
    print!("{}", bounds::table_to_csv(TableId::S5S7, &rows));
}
