use qkflag::groebner::{groebner_in, Limits};
use qkflag::order::MonomialOrder;
use qkflag::poly::{rat, rat_int, Rat, Truncation};
use qkflag::present::{classical_whitney, quantum_whitney};
use qkflag::ring::{QuotientRing, ScalarMode};
use qkflag::FlagShape;

fn lambdas(n: usize) -> Vec<Rat> {
    (0..n).map(|k| rat_int(1) + rat(2 * k as i64 + 3, 64)).collect()
}

fn main() {
    let shape = FlagShape::parse("1,2:3").unwrap();
    let lam = lambdas(3);

    let classical = classical_whitney(&shape, true)
        .unwrap()
        .eliminate_aux()
        .unwrap()
        .specialize_lambda(&lam)
        .unwrap();
    println!("classical relations:");
    for r in &classical.relations {
        println!("  [{}] {}", r.provenance, r.poly);
    }
    let table = classical.table.clone();
    let order = MonomialOrder::block(&table);
    let cb = groebner_in(&classical.relation_polys(), &table, &order, &Truncation::at(0), &Limits::default()).unwrap();
    let std = cb.standard_monomials().unwrap();
    println!("classical rank: {}", std.len());
    for m in &std {
        println!("  std: {}", m.display(&table));
    }

    let quantum = quantum_whitney(&shape).unwrap();
    println!("\nquantum relations (eliminated):");
    let elim = quantum.eliminate_aux().unwrap().specialize_lambda(&lam).unwrap();
    for r in &elim.relations {
        println!("  [{}] {}", r.provenance, r.poly);
    }
    let ring = QuotientRing::build(&quantum, &ScalarMode::Formal { cap: 3 }, &lam, &Limits::default()).unwrap();
    println!("quantum rank: {}", ring.rank());
    for m in ring.standard_monomials() {
        println!("  std: {}", m.display(ring.table()));
    }
    println!("leads:");
    for l in ring.basis().leading_monomials() {
        println!("  LT: {}", l.display(ring.table()));
    }
}
