//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use gbe_core::conjecture::check_structure;
use gbe_core::exact::{Rat, RatFn};
use gbe_core::jets::JetEngine;
use gbe_core::merge::merge_all;
use gbe_core::moments::{check_gaussian_n1, duality, expand_inf, moment_poly, MomentPoly};
use gbe_core::recursions::{crosscheck, leading_identity};
use gbe_core::reference;
use gbe_core::slice::SliceEngine;
use gbe_core::solver::{base_w1_0, Engine};
use gbe_core::ycalc::{r_poly, y_taylor};
use gbe_core::GbeError;
use gbe_mc::{compare, McConfig};

struct Outcome {
    pass: bool,
    detail: String,
    /// Fails only because a required object could not be built here.
    unattainable: bool,
}

fn entries(max_chi: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for chi in 1..=max_chi {
        for g in 0..=chi / 2 {
            let n = chi - 2 * g;
            if n >= 1 && (n, g) != (1, 0) {
                v.push((n, g));
            }
        }
    }
    v
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, unattainable: false }
}

fn golden() -> Outcome {
    let e = Engine::new();
    let refs = reference::all();
    let mut bad = Vec::new();
    for r in &refs {
        let w = e.solve(r.n, r.g).unwrap();
        let w = if r.coinciding { w.map(merge_all).unwrap() } else { (*w).clone() };
        for k in 0..=r.g {
            let got = w.coeff(k);
            let ok = match r.parts.iter().find(|(j, _)| *j == k) {
                Some((_, want)) => got.equal(want),
                None => got.is_zero(),
            };
            if !ok {
                bad.push(format!("{} hbar^{k}", r.name));
            }
        }
    }
    outcome(bad.is_empty(), format!("{} closed forms, mismatches {bad:?}", refs.len()))
}

fn battery() -> Outcome {
    let jets = JetEngine::new();
    let e = Engine::new();
    let mut bad = Vec::new();
    let all = entries(10);
    for &(n, g) in &all {
        let w = jets.coinciding(n, g).unwrap();
        let s = check_structure(&w, n, g).unwrap();
        if !s.passed() || s.asymptotic_order != Some(3 * n as i64 + 2 * g as i64 - 2) {
            bad.push((n, g));
        }
    }
    // the jet route against merged multivariate solutions where both exist
    let mut agree = 0;
    for (n, g) in entries(6) {
        let merged = e.solve(n, g).unwrap().map(merge_all).unwrap();
        if merged.equal(&jets.coinciding(n, g).unwrap()) {
            agree += 1;
        } else {
            bad.push((n, g));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} cases with 2g+n <= 10, jets = merged solver on {agree} cases; failures {bad:?}", all.len()),
    )
}

fn oracle() -> Outcome {
    let jets = JetEngine::new();
    let rows = crosscheck(6, |n, g| jets.coinciding(n, g)).unwrap();
    let bad: Vec<usize> = rows.iter().filter(|r| !r.passed()).map(|r| r.g).collect();
    let ident = (1..=50).all(leading_identity);
    outcome(bad.is_empty() && ident, format!("g <= 6, failing g {bad:?}, identity {ident}"))
}

const MEM_KB: u64 = 3_500_000;
const PER_CASE: Duration = Duration::from_secs(120);

enum Attempt {
    Pass,
    Fail,
    OutOfResources(String),
}

/// The full multivariate relation in a child process with capped memory.
fn x2_multivariate(n: usize, g: usize) -> Attempt {
    let bin = env!("CARGO_BIN_EXE_gbe");
    let script = format!("ulimit -v {MEM_KB}; exec \"{bin}\" --threads 1 x2 --n {n} --g {g}");
    let mut child = Command::new("sh")
        .args(["-c", &script])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let start = Instant::now();
    loop {
        if let Some(status) = child.try_wait().unwrap() {
            return match status.code() {
                Some(0) => Attempt::Pass,
                Some(1) => Attempt::Fail,
                _ => Attempt::OutOfResources("memory".into()),
            };
        }
        if start.elapsed() > PER_CASE {
            let _ = child.kill();
            let _ = child.wait();
            return Attempt::OutOfResources("time".into());
        }
        std::thread::sleep(Duration::from_millis(50));
    }
}

fn x2_relation() -> Outcome {
    let cases: Vec<(usize, usize)> = entries(10).into_iter().filter(|(n, _)| *n >= 2).collect();
    let (mut passed, mut failed, mut missing) = (Vec::new(), Vec::new(), Vec::new());
    for &(n, g) in &cases {
        match x2_multivariate(n, g) {
            Attempt::Pass => passed.push((n, g)),
            Attempt::Fail => failed.push((n, g)),
            Attempt::OutOfResources(why) => missing.push(format!("({n},{g}) {why}")),
        }
    }
    let order = 4;
    let slices = SliceEngine::new();
    let slice_bad: Vec<_> =
        cases.iter().filter(|&&(n, g)| !slices.x2_relation(n, g, order).unwrap()).copied().collect();
    let detail = format!(
        "multivariate: {} of {} pass, failing {failed:?}, not computable within {} MB / {}s: {missing:?}; \
         diagonal jets to order {order}: {} of {} pass",
        passed.len(),
        cases.len(),
        MEM_KB / 1000,
        PER_CASE.as_secs(),
        cases.len() - slice_bad.len(),
        cases.len()
    );
    Outcome {
        pass: failed.is_empty() && missing.is_empty() && slice_bad.is_empty(),
        detail,
        unattainable: failed.is_empty() && slice_bad.is_empty() && !missing.is_empty(),
    }
}

fn r_calculus() -> Outcome {
    let mut ok = true;
    for n in 1..=30usize {
        let r = r_poly(n).unwrap();
        if n >= 2 {
            let sign = if n % 2 == 0 { -2 } else { 2 };
            ok &= r.degree() == Some(n - 2);
            ok &= r.leading_coeff() == &Rat::from_int(sign) * &Rat::factorial(n as u64);
            ok &= r.t_power(n - 2) == Some(1);
        }
        ok &= r.coeffs.iter().enumerate().all(|(k, c)| (n - k) % 2 == 0 || c.is_zero());
        let next = r_poly(n + 1).unwrap();
        let one = Rat::ONE;
        let a = |k: i64| if k < 0 { Rat::ZERO } else { r.coeff_at(k as usize, &one) };
        for k in 0..=n as i64 {
            let want = &(&Rat::from_int(k - 2 * n as i64) * &a(k - 1)) - &(&Rat::from_int(4 * (k + 1)) * &a(k + 1));
            ok &= next.coeff_at(k as usize, &one) == want;
        }
    }
    let kmax = 30;
    let c = y_taylor(1, 1, kmax);
    for d in 0..=kmax {
        let mut s = RatFn::zero(1);
        for a in 0..=d {
            s = s.add(&c[a].mul(&c[d - a]));
        }
        let want = match d {
            0 => RatFn::y(1, 1).mul_y(1),
            1 => RatFn::x(1, 1).scale(&Rat::from_int(2)),
            2 => RatFn::one(1),
            _ => RatFn::zero(1),
        };
        ok &= s.equal(&want);
    }
    outcome(ok, format!("R_n for n <= 30, y-series squared to order {kmax}"))
}

fn moments(jets: &JetEngine, kmax: usize) -> Vec<MomentPoly> {
    (1..=kmax)
        .map(|k| moment_poly(k, |l| if l == 0 { Ok(base_w1_0()) } else { jets.coinciding(1, l) }).unwrap())
        .collect()
}

fn finite_n() -> Outcome {
    let jets = JetEngine::new();
    let kmax = 6;
    let ms = moments(&jets, kmax);
    let n1 = check_gaussian_n1(&ms);
    let dual = ms.iter().all(duality);
    let spurious = ms.iter().all(|m| m.spurious.is_empty());
    // W_1^(l) starts at x^(-2l-1) and has no even powers of 1/x
    let mut orders = true;
    for l in 1..=2 * kmax {
        let w = jets.coinciding(1, l).unwrap();
        let top = 2 * l as i64 + 7;
        let series: Vec<_> = w.parts.iter().map(|p| expand_inf(p, top).unwrap()).collect();
        let first = series.iter().filter_map(|s| s.first_nonzero()).min();
        orders &= first == Some(2 * l as i64 + 1);
        orders &= series.iter().all(|s| (0..=top / 2).all(|j| s.coeff(2 * j).is_zero()));
    }
    outcome(
        n1 && dual && spurious && orders,
        format!("k <= {kmax} (W_1 up to l = {}): N=1 identity {n1}, duality {dual}, l > k vanish {spurious}, orders {orders}", 2 * kmax),
    )
}

fn monte_carlo() -> Outcome {
    let jets = JetEngine::new();
    let ms = moments(&jets, 2);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (n, kappa)) in [(1, 2.0), (2, 1.0), (8, 0.5), (8, 2.5)].into_iter().enumerate() {
        let cfg = McConfig { n, kappa, t: 1.0, samples: 1_000_000, seed: 1000 + i as u64, k_max: 2 };
        let rep = compare(&cfg, &ms).unwrap();
        ok &= rep.passed(5.0) && rep.estimate.rejected == 0;
        worst = worst.max(rep.max_abs_z());
        let zs: Vec<String> = rep.rows.iter().map(|r| format!("{:+.2}", r.z)).collect();
        parts.push(format!("({n},{kappa}) z = [{}]", zs.join(", ")));
    }
    outcome(ok, format!("10^6 samples each, max |z| = {worst:.2}: {}", parts.join("; ")))
}

fn regularity() -> Outcome {
    let singular = RatFn::one(2).div_diff(1, 2, 1);
    let rejects = matches!(merge_all(&singular), Err(GbeError::NonRegular { .. }));
    let e = Engine::new();
    let mut count = 0;
    let mut bad = Vec::new();
    for (n, g) in entries(6).into_iter().filter(|(n, _)| *n >= 2) {
        for p in &e.solve(n, g).unwrap().parts {
            count += 1;
            if merge_all(p).is_err() {
                bad.push((n, g));
            }
        }
    }
    outcome(rejects && bad.is_empty(), format!("1/(x1-x2) rejected {rejects}; {count} computed parts merge cleanly, failures {bad:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden exactness", golden),
        ("conjecture battery", battery),
        ("oracle equivalence", oracle),
        ("x^2 relation", x2_relation),
        ("R-calculus", r_calculus),
        ("finite-N moment identity", finite_n),
        ("Monte Carlo consistency", monte_carlo),
        ("regularity enforcement", regularity),
    ];
    let mut hard_fail = false;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let tag = match (o.pass, o.unattainable) {
            (true, _) => "PASS",
            (false, true) => "FAIL (unattainable here)",
            (false, false) => "FAIL",
        };
        println!("criterion {}: {tag} {name} [{:.1}s] {}", i + 1, t.elapsed().as_secs_f64(), o.detail);
        hard_fail |= !o.pass && !o.unattainable;
    }
    if hard_fail {
        std::process::exit(1);
    }
}
