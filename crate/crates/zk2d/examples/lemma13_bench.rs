use std::time::Instant;
use zk2d::growth::{lemma13_constants, lemma13_verify};
fn main() {
    let t0 = Instant::now();
    let env = lemma13_constants(1.0, 0.5, 3.0, 0.0).unwrap();
    let ok = lemma13_verify(&env, 100_000).unwrap();
    println!("one verify (N={}): {:?} ok={ok}", env.n, t0.elapsed());
    let t1 = Instant::now();
    let mut all = true;
    for k1 in [0.1, 1.0, 10.0] {
        for eps in [0.3, 0.5, 0.9] {
            for dm in [1.1, 2.0, 5.0] {
                let d = dm / eps;
                let env = lemma13_constants(k1, eps, d, 0.0).unwrap();
                all &= lemma13_verify(&env, 100_000).unwrap();
            }
        }
    }
    println!("full 27-point grid: {:?} all={all}", t1.elapsed());
}
