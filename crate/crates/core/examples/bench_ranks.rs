use qkflag::groebner::Limits;
use qkflag::poly::{rat, rat_int, Rat};
use qkflag::present::quantum_whitney;
use qkflag::ring::{build_ring, rank_gate, ScalarMode};
use qkflag::FlagShape;
use std::time::Instant;

fn lambdas(n: usize) -> Vec<Rat> {
    (0..n).map(|k| rat_int(1) + rat(2 * k as i64 + 3, 64)).collect()
}

fn main() {
    for spec in ["1:2", "1:3", "2:3", "2:4", "1,2:3", "1,3:4", "1,2,3:4"] {
        let t0 = Instant::now();
        let shape = FlagShape::parse(spec).unwrap();
        let pres = quantum_whitney(&shape).unwrap();
        let ring = build_ring(
            &pres,
            &ScalarMode::Formal { cap: 3 },
            &lambdas(shape.ambient()),
            &Limits::default(),
        )
        .unwrap();
        let gate = rank_gate(&ring, &Limits::default()).unwrap();
        println!(
            "{spec}: rank {} (expected {}), gate pass={}, {:?}",
            ring.rank(),
            ring.expected_rank(),
            gate.pass,
            t0.elapsed()
        );
    }
}
