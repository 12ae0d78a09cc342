mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use gbe_core::cache::Cache;
use gbe_core::conjecture::{check_structure, check_x2_relation};
use gbe_core::jets::JetEngine;
use gbe_core::merge::merge_all;
use gbe_core::moments::{check_gaussian_n1, duality, moment_poly, MomentPoly};
use gbe_core::recursions::crosscheck;
use gbe_core::reference;
use gbe_core::slice::SliceEngine;
use gbe_core::solver::{base_w1_0, CorrFn, Engine};
use gbe_core::ycalc::r_poly;
use gbe_core::GbeError;
use gbe_mc::{compare, McConfig};
use serde_json::json;

use format::Format;

#[derive(Parser)]
#[command(name = "gbe", version, about = "Exact correlators and moments of Gaussian beta ensembles")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print W_n^(g).
    Compute {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        /// All points merged into one.
        #[arg(long)]
        coinciding: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery for all (n, g) with 2g + n <= max-chi.
    Check {
        #[arg(long)]
        max_chi: usize,
        /// Largest 2g + n for which the full multivariate x^2 relation is run.
        #[arg(long, default_value_t = 6)]
        multivariate_max_chi: usize,
        /// Jet order of the diagonal x^2 relation.
        #[arg(long, default_value_t = 2)]
        x2_order: usize,
        #[arg(long)]
        json: bool,
    },
    /// The x^2 relation for a single (n, g).
    X2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        /// Check the diagonal jets up to this order instead of the full function.
        #[arg(long)]
        jet_order: Option<usize>,
    },
    /// Exact moment polynomials m_2k for k <= kmax.
    Moments {
        #[arg(long)]
        kmax: usize,
        /// Evaluate at e.g. `N=8,kappa=0.5,T=1`.
        #[arg(long)]
        eval: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo estimates against the exact moments.
    Mc {
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        kappa: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        kmax: usize,
        #[arg(long, default_value_t = 5.0)]
        tolerance: f64,
        #[arg(long)]
        json: bool,
    },
    /// Inspect or clear the on-disk cache.
    #[command(group(ArgGroup::new("action").required(true).args(["clear", "list"])))]
    Cache {
        #[arg(long)]
        clear: bool,
        #[arg(long)]
        list: bool,
    },
}

enum Failure {
    Check(String),
    Usage(String),
    Internal(String),
}

impl From<GbeError> for Failure {
    fn from(e: GbeError) -> Failure {
        match e {
            GbeError::InvalidArgument(_) | GbeError::Parse(_) => Failure::Usage(e.to_string()),
            GbeError::NotConjectureShape(_) => Failure::Check(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 || rayon::ThreadPoolBuilder::new().num_threads(t).build_global().is_err() {
            eprintln!("error: invalid thread count");
            return ExitCode::from(2);
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Compute { n, g, coinciding, format, out } => compute(n, g, coinciding, format, out),
        Cmd::Check { max_chi, multivariate_max_chi, x2_order, json } => {
            check(max_chi, multivariate_max_chi, x2_order, json)
        }
        Cmd::X2 { n, g, jet_order } => x2(n, g, jet_order),
        Cmd::Moments { kmax, eval, json } => moments(kmax, eval, json),
        Cmd::Mc { big_n, kappa, t, samples, seed, kmax, tolerance, json } => {
            let cfg = McConfig { n: big_n, kappa, t, samples, seed, k_max: kmax };
            mc(cfg, tolerance, json)
        }
        Cmd::Cache { clear, .. } => cache(clear),
    }
}

fn compute(n: usize, g: usize, coinciding: bool, format: Format, out: Option<PathBuf>) -> Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    let w: CorrFn = if coinciding {
        if (n, g) == (1, 0) { base_w1_0() } else { JetEngine::new().coinciding(n, g)? }
    } else {
        (*Engine::with_cache(Cache::from_env()).solve(n, g)?).clone()
    };
    let text = match format {
        Format::Text => format::corrfn(&w, false),
        Format::Latex => format::corrfn(&w, true),
        Format::Machine => format::machine(&w, n, coinciding).to_string(),
    };
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
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

struct Report {
    lines: Vec<serde_json::Value>,
    failed: usize,
}

impl Report {
    fn add(&mut self, check: &str, what: String, ok: bool, json: bool) {
        if !ok {
            self.failed += 1;
        }
        if !json {
            println!("{} {check} {what}", if ok { "ok  " } else { "FAIL" });
        }
        self.lines.push(json!({ "check": check, "case": what, "ok": ok }));
    }
}

fn check(max_chi: usize, mv_chi: usize, order: usize, json: bool) -> Result<(), Failure> {
    let mut rep = Report { lines: Vec::new(), failed: 0 };
    let engine = Engine::with_cache(Cache::from_env());
    let slices = SliceEngine::new();
    let jets = slices.jets();

    for r in reference::all() {
        let ok = (|| -> gbe_core::Result<bool> {
            let w = engine.solve(r.n, r.g)?;
            let w = if r.coinciding { w.map(merge_all)? } else { (*w).clone() };
            let mut ok = true;
            for k in 0..=r.g {
                let want = r.parts.iter().find(|(j, _)| *j == k).map(|(_, f)| f.clone());
                let got = w.coeff(k);
                ok &= match want {
                    Some(f) => got.equal(&f),
                    None => got.is_zero(),
                };
            }
            Ok(ok)
        })()?;
        rep.add("golden", r.name.to_string(), ok, json);
    }

    let ok = (1..=30).all(|n| {
        let r = r_poly(n).expect("n >= 1");
        n < 2 || r.degree() == Some(n - 2)
    });
    rep.add("r-calculus", "deg R_n, n <= 30".into(), ok, json);

    for (n, g) in entries(max_chi) {
        let w = jets.coinciding(n, g)?;
        let s = check_structure(&w, n, g)?;
        rep.add("structure", format!("({n},{g})"), s.passed(), json);
    }

    for (n, g) in entries(max_chi).into_iter().filter(|(n, _)| *n >= 2) {
        if n + 2 * g <= mv_chi {
            let wn = engine.solve(n, g)?;
            let wn1 = if n == 2 && g == 0 { base_w1_0() } else { (*engine.solve(n - 1, g)?).clone() };
            let ok = check_x2_relation(&wn, &wn1)?;
            rep.add("x2-relation", format!("({n},{g}) multivariate"), ok, json);
        }
        let ok = slices.x2_relation(n, g, order)?;
        rep.add("x2-relation", format!("({n},{g}) jets to order {order}"), ok, json);
    }

    let g_max = (max_chi.saturating_sub(2) / 2).max(1);
    for row in crosscheck(g_max, |n, g| jets.coinciding(n, g))? {
        rep.add("crosscheck", format!("g = {}", row.g), row.passed(), json);
    }

    for (n, g) in entries(max_chi.min(mv_chi)).into_iter().filter(|(n, _)| *n >= 2) {
        let w = engine.solve(n, g)?;
        let ok = w.parts.iter().all(|p| merge_all(p).is_ok());
        rep.add("regularity", format!("({n},{g})"), ok, json);
    }

    if json {
        println!("{}", json!({ "max_chi": max_chi, "failed": rep.failed, "checks": rep.lines }));
    } else {
        println!("{} checks, {} failed", rep.lines.len(), rep.failed);
    }
    if rep.failed > 0 {
        return Err(Failure::Check(format!("{} checks failed", rep.failed)));
    }
    Ok(())
}

fn x2(n: usize, g: usize, jet_order: Option<usize>) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::Usage("the relation needs n >= 2".into()));
    }
    let ok = match jet_order {
        Some(k) => SliceEngine::new().x2_relation(n, g, k)?,
        None => {
            let engine = Engine::new();
            let wn = engine.solve(n, g)?;
            let wn1 = if n == 2 && g == 0 { base_w1_0() } else { (*engine.solve(n - 1, g)?).clone() };
            check_x2_relation(&wn, &wn1)?
        }
    };
    println!("({n},{g}) {}", if ok { "ok" } else { "FAIL" });
    if ok { Ok(()) } else { Err(Failure::Check(format!("x^2 relation fails for ({n},{g})"))) }
}

pub fn moment_polys(kmax: usize) -> gbe_core::Result<Vec<MomentPoly>> {
    let jets = JetEngine::new();
    (1..=kmax)
        .map(|k| moment_poly(k, |l| if l == 0 { Ok(base_w1_0()) } else { jets.coinciding(1, l) }))
        .collect()
}

fn parse_eval(s: &str) -> Result<(f64, f64, f64), Failure> {
    let (mut n, mut kappa, mut t) = (None, None, 1.0);
    for kv in s.split(',') {
        let (k, v) = kv.split_once('=').ok_or_else(|| Failure::Usage(format!("bad assignment `{kv}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| Failure::Usage(format!("bad number `{v}`")))?;
        match k.trim() {
            "N" => n = Some(v),
            "kappa" => kappa = Some(v),
            "T" => t = v,
            other => return Err(Failure::Usage(format!("unknown parameter `{other}`"))),
        }
    }
    match (n, kappa) {
        (Some(n), Some(k)) if k > 0.0 => Ok((n, k, t)),
        _ => Err(Failure::Usage("--eval needs N and a positive kappa".into())),
    }
}

fn moments(kmax: usize, eval: Option<String>, json: bool) -> Result<(), Failure> {
    if kmax == 0 {
        return Err(Failure::Usage("kmax must be at least 1".into()));
    }
    let at = eval.as_deref().map(parse_eval).transpose()?;
    let ms = moment_polys(kmax)?;
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for m in &ms {
        let n1 = check_gaussian_n1(std::slice::from_ref(m));
        let dual = duality(m);
        if !(n1 && dual && m.spurious.is_empty()) {
            bad.push(m.k);
        }
        let value = at.map(|(n, k, t)| m.value.eval(n, k, t));
        if json {
            rows.push(json!({ "k": m.k, "moment": m.value.to_string(), "n1_identity": n1, "duality": dual, "value": value }));
        } else {
            print!("m_{} = {}", 2 * m.k, m.value);
            if let Some(v) = value {
                print!("  = {v}");
            }
            println!();
        }
    }
    if json {
        println!("{}", json!({ "kmax": kmax, "moments": rows }));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("moment identities fail for k = {bad:?}")))
    }
}

fn mc(cfg: McConfig, tol: f64, json: bool) -> Result<(), Failure> {
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let ms = moment_polys(cfg.k_max)?;
    let rep = compare(&cfg, &ms).map_err(|e| Failure::Usage(e.to_string()))?;
    if json {
        println!("{}", serde_json::to_string(&rep).map_err(|e| Failure::Internal(e.to_string()))?);
    } else {
        let mut out = std::io::stdout().lock();
        writeln!(out, "N={} kappa={} T={} samples={} rejected={}", cfg.n, cfg.kappa, cfg.t, rep.estimate.samples, rep.estimate.rejected)?;
        for r in &rep.rows {
            writeln!(out, "m_{}: exact {:.6} mc {:.6} +- {:.6} z {:+.3}", 2 * r.k, r.exact, r.mean, r.std_err, r.z)?;
        }
    }
    if rep.passed(tol) {
        Ok(())
    } else {
        Err(Failure::Check(format!("|z| = {:.2} exceeds {tol}", rep.max_abs_z())))
    }
}

fn cache(clear: bool) -> Result<(), Failure> {
    let c = Cache::from_env();
    if clear {
        let k = c.clear()?;
        println!("removed {k} entries from {}", c.dir().display());
    } else {
        for (n, g) in c.list()? {
            println!("{}", Cache::file_name(n, g));
        }
    }
    Ok(())
}
