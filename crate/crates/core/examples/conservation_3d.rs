//! Invariants of the 3D experiment with variable density.
//!
//! `cargo run --release --example conservation_3d -- [n] [A|B]`
use std::sync::Arc;

use mhdfem::diagnostics::relative_drift;
use mhdfem::forms::Scheme;
use mhdfem::mms::preset_3d;
use mhdfem::stepper::{init_state, MagneticInit, SchemeConfig, Stepper};
use mhdfem::{build_box_mesh, Discretization};

fn main() -> mhdfem::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(4, |a| a.parse().expect("cubes per side"));
    let scheme = match args.next().as_deref() {
        Some("A") => Scheme::A,
        _ => Scheme::B,
    };
    let p = preset_3d(true);
    let disc = Arc::new(Discretization::new(Arc::new(build_box_mesh(&p.domain(n), 3)?))?);
    let s0 = init_state(&disc, &|x| p.u0(x), MagneticInit::Potential(&|x| p.a0(x)), &|x| p.rho0(x))?;
    let cfg = SchemeConfig {
        scheme,
        dt: p.dt,
        t_final: p.t_final,
        ..Default::default()
    };
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>3}", "t", "mass", "rho2", "energy", "helicity", "div", "it");
    let mut first = None;
    Stepper::new(disc, cfg)?.run(s0, None, |k, t, _, r| {
        let r0 = first.get_or_insert_with(|| r.clone());
        let d = relative_drift(r0, r);
        if k % 5 == 0 {
            println!(
                "{t:>5.2} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>3}",
                d[0].unwrap(),
                d[1].unwrap(),
                d[2].unwrap(),
                d[4].unwrap_or(f64::NAN),
                r.div_u_l2.max(r.div_b_l2),
                r.fp_iters
            );
        }
    })?;
    Ok(())
}
