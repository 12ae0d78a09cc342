use gbe_core::jets::JetEngine;
use gbe_core::moments::{moment_poly, MomentPoly};
use gbe_core::solver::base_w1_0;
use gbe_mc::{compare, estimate, McConfig};

fn moments(k_max: usize) -> Vec<MomentPoly> {
    let jets = JetEngine::new();
    (1..=k_max)
        .map(|k| moment_poly(k, |l| if l == 0 { Ok(base_w1_0()) } else { jets.coinciding(1, l) }).unwrap())
        .collect()
}

fn cfg(n: usize, kappa: f64, samples: u64, k_max: usize) -> McConfig {
    McConfig { n, kappa, t: 1.0, samples, seed: 20240611, k_max }
}

fn z(mean: f64, se: f64, exact: f64) -> f64 {
    (mean - exact) / se
}

#[test]
fn single_gaussian() {
    let e = estimate(&cfg(1, 2.0, 200_000, 2)).unwrap();
    assert!(z(e.mean[0], e.std_err[0], 0.5).abs() < 5.0, "{e:?}");
    // fourth moment 3 (T / kappa)^2
    assert!(z(e.mean[1], e.std_err[1], 0.75).abs() < 5.0, "{e:?}");
}

#[test]
fn two_points_second_moment() {
    let e = estimate(&cfg(2, 1.0, 200_000, 1)).unwrap();
    assert!(z(e.mean[0], e.std_err[0], 2.0).abs() < 5.0, "{e:?}");
}

#[test]
fn semicircle_second_moment() {
    let n = 64;
    let e = estimate(&cfg(n, 1.0, 20_000, 1)).unwrap();
    let (m, se) = (e.mean[0] / n as f64, e.std_err[0] / n as f64);
    // 1/N bias bound on top of the statistical band
    assert!((m - 1.0).abs() < 5.0 * se + 1.0 / n as f64, "{m} +- {se}");
}

#[test]
fn n1_against_the_gaussian_oracle() {
    let ms = moments(3);
    for kappa in [0.5, 1.0, 3.0] {
        let r = compare(&cfg(1, kappa, 200_000, 3), &ms).unwrap();
        assert!(r.passed(5.0), "{:?}", r.rows);
    }
}

#[test]
fn exact_polynomials_at_small_n() {
    let ms = moments(2);
    for (n, kappa) in [(8, 0.5), (8, 2.5), (3, 1.0)] {
        let r = compare(&cfg(n, kappa, 100_000, 2), &ms).unwrap();
        assert!(r.passed(5.0), "({n},{kappa}) {:?}", r.rows);
    }
}

#[test]
fn thread_count_does_not_change_estimates() {
    let c = cfg(5, 1.25, 20_000, 2);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| estimate(&c).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.mean, b.mean);
    assert_eq!(a.std_err, b.std_err);
}
