//! Upwinded density transport: ∫ρ² decays, everything else is kept.
use std::sync::Arc;

use mhdfem::diagnostics::relative_drift;
use mhdfem::forms::{UpwindKind, UpwindParams};
use mhdfem::mms::preset_3d;
use mhdfem::stepper::{init_state, MagneticInit, SchemeConfig, Stepper};
use mhdfem::{build_box_mesh, Discretization};

fn main() -> mhdfem::Result<()> {
    let p = preset_3d(true);
    let disc = Arc::new(Discretization::new(Arc::new(build_box_mesh(&p.domain(3), 3)?))?);
    let variants = [
        ("none", None),
        ("abs", Some(UpwindParams::new(0.5, 0.01, UpwindKind::Abs)?)),
        ("smooth", Some(UpwindParams::default())),
    ];
    for (name, upwind) in variants {
        let s0 = init_state(&disc, &|x| p.u0(x), MagneticInit::Potential(&|x| p.a0(x)), &|x| p.rho0(x))?;
        let cfg = SchemeConfig {
            upwind,
            dt: p.dt,
            t_final: p.t_final,
            ..Default::default()
        };
        let out = Stepper::new(disc.clone(), cfg)?.run(s0, None, |_, _, _, _| {})?;
        let (r0, r1) = (&out.records[0], out.records.last().unwrap());
        let d = relative_drift(r0, r1);
        println!(
            "{name:>6}: rho2 change {:+.3e}, mass {:.1e}, energy {:.1e}, helicity {:.1e}",
            (r1.rho2 - r0.rho2) / r0.rho2,
            d[0].unwrap(),
            d[2].unwrap(),
            d[4].unwrap()
        );
    }
    Ok(())
}
