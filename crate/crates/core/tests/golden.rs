use gbe_core::merge::merge_all;
use gbe_core::reference;
use gbe_core::solver::Engine;

#[test]
fn solver_reproduces_references() {
    let e = Engine::new();
    for r in reference::all() {
        let w = e.solve(r.n, r.g).unwrap();
        for (k, want) in &r.parts {
            let mut got = w.coeff(*k);
            if r.coinciding {
                got = merge_all(&got).unwrap();
            }
            assert!(got.equal(want), "{} hbar^{k}: got {got}", r.name);
        }
        for k in 0..=r.g {
            if r.parts.iter().all(|(j, _)| *j != k) {
                assert!(w.coeff(k).is_zero(), "{} has an unexpected hbar^{k} part", r.name);
            }
        }
    }
}
