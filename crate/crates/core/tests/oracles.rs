use gbe_core::conjecture::{check_structure, decompose};
use gbe_core::jets::JetEngine;
use gbe_core::merge::merge_all;
use gbe_core::recursions::{crosscheck, PolyChains};
use gbe_core::solver::Engine;

#[test]
fn recursions_match_the_jets() {
    let jets = JetEngine::new();
    let rows = crosscheck(6, |n, g| jets.coinciding(n, g)).unwrap();
    for r in &rows {
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn recursions_match_the_multivariate_solver() {
    let e = Engine::new();
    let rows = crosscheck(3, |n, g| e.solve(n, g)?.map(merge_all)).unwrap();
    assert!(rows.iter().all(|r| r.passed()), "{rows:?}");
}

#[test]
fn slot_polynomials_match_decomposition() {
    let jets = JetEngine::new();
    let polys = PolyChains::up_to(5);
    for g in 1..=5 {
        let w1 = jets.coinciding(1, g).unwrap();
        let d = decompose(&w1, 1, g).unwrap();
        assert_eq!(d[0], (polys.p1[g].p1.clone(), polys.p1[g].p2.clone()));
        if g >= 2 {
            assert_eq!(d[1], (polys.p3[g].p1.clone(), polys.p3[g].p2.clone()));
        }
        assert!(check_structure(&w1, 1, g).unwrap().passed());
    }
}
