//! VTK snapshots of the 2D manufactured solution.
//!
//! `cargo run --release --example vtk_export -- [output dir]`
use std::path::PathBuf;

use mhdfem::cli::{cmd_run, parse_config};

fn main() {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("vtk_out"), PathBuf::from);
    let cfg = parse_config(&format!(
        "dim = 2\nn = 16\nscheme = B\ndt = 0.01\nT = 0.5\nsnapshot_every = 10\noutput = {}",
        out.display()
    ))
    .expect("valid config");
    match cmd_run(&cfg) {
        Ok(s) => {
            for p in &s.snapshots {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(mhdfem::cli::exit_code(&e));
        }
    }
}
