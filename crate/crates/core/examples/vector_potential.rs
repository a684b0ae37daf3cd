//! Recovering a vector potential from a discrete magnetic field.
use std::sync::Arc;

use mhdfem::diagnostics::{helicity_of, recover_potential};
use mhdfem::mms::preset_3d;
use mhdfem::{build_box_mesh, Discretization, Family, Point};

fn main() -> mhdfem::Result<()> {
    let p = preset_3d(true);
    let disc = Discretization::new(Arc::new(build_box_mesh(&p.domain(4), 3)?))?;
    let a_exact = disc.interpolate(Family::Ned0, &|x: &Point| p.a0(x))?;
    let b = disc.curl.mul_vec(&a_exact);
    let a = recover_potential(&disc, &b)?;
    let cb = disc.curl.mul_vec(&a);
    let err = cb.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    println!("max |curl A - B| = {err:.2e}");
    println!(
        "helicity: interpolated potential {:.6e}, recovered {:.6e}",
        helicity_of(&disc, &a_exact, &b),
        helicity_of(&disc, &a, &b)
    );
    // adding a gradient changes neither curl A nor the helicity
    let grad = disc.interpolate(Family::Ned0, &|x: &Point| {
        let (fx, fy, fz) = (1.0 - x.x * x.x, 1.0 - x.y * x.y, 1.0 - x.z * x.z);
        Point::new(-2.0 * x.x * fy * fz, -2.0 * x.y * fx * fz, -2.0 * x.z * fx * fy)
    })?;
    let shifted: Vec<f64> = a.iter().zip(&grad).map(|(x, g)| x + g).collect();
    let cs = disc.curl.mul_vec(&shifted);
    println!(
        "gauge shift: max |curl (A + grad phi) - B| = {:.2e}, helicity {:.6e}",
        cs.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
        helicity_of(&disc, &shifted, &b)
    );
    Ok(())
}
