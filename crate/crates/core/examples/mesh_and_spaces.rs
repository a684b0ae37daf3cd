//! Box meshes and the discrete spaces built on them.
use std::sync::Arc;

use mhdfem::{build_box_mesh, BoxSpec, Discretization};

fn main() -> mhdfem::Result<()> {
    for (dim, n) in [(2, 4), (3, 2)] {
        let mesh = Arc::new(build_box_mesh(&BoxSpec::cube(-1.0, 1.0, n), dim)?);
        let disc = Discretization::new(mesh.clone())?;
        println!(
            "{dim}D, {n} per side: {} cells, {} vertices, h = {:.4}",
            mesh.num_cells(),
            mesh.num_vertices(),
            mesh.max_diameter()
        );
        println!(
            "  RT0 {} dofs, NED0 {} dofs, DG0 {} dofs, curl space {} dofs",
            disc.rt.ndofs(),
            disc.ned.ndofs(),
            disc.dg.ndofs(),
            disc.curl_space.ndofs()
        );
        // div ∘ curl = 0 exactly
        let z: Vec<f64> = (0..disc.curl_space.ndofs()).map(|i| (i as f64).sin()).collect();
        let div = disc.div.mul_vec(&disc.curl.mul_vec(&z));
        println!("  max |div curl z| = {:e}", div.iter().fold(0.0f64, |m, d| m.max(d.abs())));
    }
    Ok(())
}
