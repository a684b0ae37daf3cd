//! Nearest discretely divergence-free field with zero normal flux.
use std::sync::Arc;

use mhdfem::diagnostics::{l2_error, Exact};
use mhdfem::mms::preset_3d;
use mhdfem::{build_box_mesh, Discretization, Family, Point};

fn main() -> mhdfem::Result<()> {
    let p = preset_3d(true);
    for n in [2, 4, 6] {
        let disc = Discretization::new(Arc::new(build_box_mesh(&p.domain(n), 3)?))?;
        let u = disc.project_divfree(&|x: &Point| p.u0(x))?;
        let div = disc.divergence(&u);
        println!(
            "n = {n}: |u0 - Pu0| = {:.4e}, max |div Pu0| = {:.1e}",
            l2_error(&disc, Family::Rt0, &u, Exact::Vector(&|x| p.u0(x))),
            div.iter().fold(0.0f64, |m, d| m.max(d.abs()))
        );
    }
    Ok(())
}
