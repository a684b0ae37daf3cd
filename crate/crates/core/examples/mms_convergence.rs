//! Convergence of both schemes on the 2D manufactured solution.
//!
//! `cargo run --release --example mms_convergence -- [dt] [levels]`
use mhdfem::cli::MmsReport;
use mhdfem::forms::Scheme;
use mhdfem::mms::{level_subdivisions, observed_orders, run_mms};
use mhdfem::stepper::SchemeConfig;

fn main() -> mhdfem::Result<()> {
    let mut args = std::env::args().skip(1);
    let dt: f64 = args.next().map_or(0.01, |a| a.parse().expect("time step"));
    let levels: Vec<u32> = args
        .next()
        .map_or("1,2,3".into(), |a| a)
        .split(',')
        .map(|j| j.parse().expect("level"))
        .collect();
    for scheme in [Scheme::A, Scheme::B] {
        let cfg = SchemeConfig {
            scheme,
            dt,
            t_final: 0.5,
            ..Default::default()
        };
        let rows = levels
            .iter()
            .map(|&j| run_mms(level_subdivisions(j), &cfg))
            .collect::<mhdfem::Result<Vec<_>>>()?;
        let report = MmsReport {
            levels: levels.clone(),
            orders: observed_orders(&rows),
            rows,
        };
        println!("scheme {scheme:?}, dt = {dt}\n{}", report.text());
    }
    Ok(())
}
