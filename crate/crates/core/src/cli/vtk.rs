//! Legacy ASCII VTK snapshots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::mesh::Point;
use crate::spaces::Discretization;
use crate::stepper::State;

/// Cell averages of an RT0 field.
fn cell_average(disc: &Discretization, coeffs: &[f64]) -> Vec<Point> {
    let vals = disc.eval_qp(&disc.tab_rt, coeffs);
    let nq = disc.nq();
    (0..disc.num_cells())
        .map(|k| {
            let w = &disc.qweights[k * nq..(k + 1) * nq];
            let s: Point = (0..nq).map(|q| vals[k * nq + q] * w[q]).sum();
            s / w.iter().sum::<f64>()
        })
        .collect()
}

/// Renders `state` as a legacy VTK unstructured grid with cell data
/// `rho`, `p`, `div_u`, `div_B` and cell-averaged vectors `u`, `B`.
pub fn render_vtk(disc: &Discretization, state: &State) -> String {
    let mesh = &disc.mesh;
    let (nc, nv) = (mesh.num_cells(), mesh.dim() + 1);
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "mhd k={} t={}", state.k, state.t);
    let _ = writeln!(s, "ASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    let _ = writeln!(s, "CELLS {} {}", nc, nc * (nv + 1));
    for k in 0..nc {
        let ids: Vec<String> = mesh.cell(k).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{} {}", nv, ids.join(" "));
    }
    let ty = if mesh.dim() == 2 { 5 } else { 10 };
    let _ = writeln!(s, "CELL_TYPES {nc}");
    for _ in 0..nc {
        let _ = writeln!(s, "{ty}");
    }
    let _ = writeln!(s, "CELL_DATA {nc}");
    let scalars = [
        ("rho", state.rho.clone()),
        ("p", state.p.clone()),
        ("div_u", disc.divergence(&state.u)),
        ("div_B", disc.divergence(&state.b)),
    ];
    for (name, vals) in &scalars {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in vals {
            let _ = writeln!(s, "{v}");
        }
    }
    for (name, coeffs) in [("u", &state.u), ("B", &state.b)] {
        let _ = writeln!(s, "VECTORS {name} double");
        for v in cell_average(disc, coeffs) {
            let _ = writeln!(s, "{} {} {}", v.x, v.y, v.z);
        }
    }
    s
}

pub fn write_vtk(disc: &Discretization, state: &State, path: &Path) -> Result<()> {
    fs::write(path, render_vtk(disc, state))?;
    Ok(())
}
