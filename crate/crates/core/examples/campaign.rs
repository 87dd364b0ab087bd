//! Runs a default campaign and prints one line per report: `cargo run --release --example campaign -- 2d --no-gate`.

use rieszkit::verify::{run_suite, SuiteConfig};
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "1d".into());
    let mut cfg = if which == "2d" { SuiteConfig::default_2d() } else { SuiteConfig::default_1d() };
    if std::env::args().any(|a| a == "--no-gate") {
        cfg.gate = None;
    }
    let t = Instant::now();
    let rep = run_suite(&cfg).unwrap();
    for r in &rep.reports {
        let drifts: Vec<String> = r.refinement.iter().map(|p| format!("{:.4}", p.sup_ratio)).collect();
        println!(
            "{:<16} {:<10} {:?} sup={:.4e} ref=[{}] spread={:?} hom={:.1e} id={:?} {}",
            r.name, r.family, r.verdict, r.sup_ratio, drifts.join(","), r.spread, r.homogeneity_defect, r.identity_defect, r.commentary.join(" | ")
        );
    }
    for e in &rep.errors {
        println!("ERROR {}: {}", e.check, e.message);
    }
    println!("verdict {:?} in {:.1}s", rep.verdict, t.elapsed().as_secs_f64());
}
