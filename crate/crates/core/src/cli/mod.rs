//! Experiment drivers behind the `mhd` binary.

pub mod config;
pub mod vtk;

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::thread;

pub use config::{parse_config, InitKind, RunConfig};
pub use vtk::{render_vtk, write_vtk};

use crate::diagnostics::{InvariantRecord, CSV_HEADER};
use crate::error::{Error, Result};
use crate::forms::{Scheme, UpwindParams};
use crate::mesh::{build_box_mesh, Point};
use crate::mms::{level_subdivisions, mms_2d, observed_orders, preset_3d, run_mms, MmsErrors};
use crate::spaces::Discretization;
use crate::stepper::{init_state, Forcing, MagneticInit, State, Stepper};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::InvalidSpec(_) => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_SOLVER,
    }
}

/// Discretization and initial state selected by `cfg.init`.
pub fn initial_state(cfg: &RunConfig) -> Result<(Arc<Discretization>, State)> {
    let mesh = Arc::new(build_box_mesh(&cfg.box_spec(), cfg.dim)?);
    let disc = Arc::new(Discretization::new(mesh)?);
    let state = match cfg.init {
        InitKind::Mms2d => {
            let m = mms_2d();
            init_state(
                &disc,
                &|x| m.u(x, 0.0),
                MagneticInit::Potential(&|x| Point::new(0.0, 0.0, m.b_stream(x, 0.0))),
                &|x| m.rho(x, 0.0),
            )?
        }
        InitKind::Preset3dVariable | InitKind::Preset3dConstant => {
            let p = preset_3d(cfg.init == InitKind::Preset3dVariable);
            init_state(&disc, &|x| p.u0(x), MagneticInit::Potential(&|x| p.a0(x)), &|x| p.rho0(x))?
        }
        InitKind::Zero => init_state(
            &disc,
            &|_| Point::zeros(),
            MagneticInit::Field(&|_| Point::zeros()),
            &|_| 1.0,
        )?,
    };
    Ok((disc, state))
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub records: Vec<InvariantRecord>,
    pub csv: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

/// Runs `cfg`, writing `invariants.csv` (one row per step, flushed row by row)
/// and VTK snapshots into `cfg.output`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunSummary> {
    let scheme = cfg.scheme_config();
    scheme.validate()?;
    let (disc, mut state) = initial_state(cfg)?;
    let stepper = Stepper::new(disc.clone(), scheme)?;
    let case = mms_2d();
    let forcing: Option<&dyn Forcing> = (cfg.init == InitKind::Mms2d).then_some(&case as &dyn Forcing);

    fs::create_dir_all(&cfg.output)?;
    let csv = cfg.output.join("invariants.csv");
    let mut out = BufWriter::new(File::create(&csv)?);
    writeln!(out, "{CSV_HEADER}")?;
    let mut summary = RunSummary {
        records: Vec::new(),
        csv,
        snapshots: Vec::new(),
    };
    let nsteps = stepper.config.num_steps();
    let mut fp_iters = 0;
    loop {
        let rec = stepper.record(&state, fp_iters);
        writeln!(out, "{}", rec.csv_row())?;
        out.flush()?;
        summary.records.push(rec);
        if cfg.snapshot_every > 0 && (state.k % cfg.snapshot_every == 0 || state.k == nsteps) {
            let path = cfg.output.join(format!("snapshot_{:05}.vtk", state.k));
            write_vtk(&disc, &state, &path)?;
            summary.snapshots.push(path);
        }
        if state.k == nsteps {
            break;
        }
        let (next, info) = stepper.step(&state, forcing)?;
        fp_iters = info.iterations;
        state = next;
    }
    Ok(summary)
}

#[derive(Clone, Debug)]
pub struct MmsReport {
    pub levels: Vec<u32>,
    pub rows: Vec<MmsErrors>,
    /// `[u, B, ρ, p]` orders between consecutive levels.
    pub orders: Vec<[f64; 4]>,
}

impl MmsReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("j,n,h,err_u,err_B,err_rho,err_p");
        let with_orders = self.rows.len() > 1;
        if with_orders {
            s.push_str(",order_u,order_B,order_rho,order_p");
        }
        s.push('\n');
        for (i, (j, r)) in self.levels.iter().zip(&self.rows).enumerate() {
            let _ = write!(s, "{j},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.n, r.h, r.u, r.b, r.rho, r.p);
            if with_orders {
                match i.checked_sub(1).map(|i| self.orders[i]) {
                    Some(o) => {
                        let _ = write!(s, ",{:.16e},{:.16e},{:.16e},{:.16e}", o[0], o[1], o[2], o[3]);
                    }
                    None => s.push_str(",,,,"),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "{:>3} {:>4} {:>10} {:>12} {:>12} {:>12} {:>12}",
            "j", "n", "h", "|u-u_h|", "|B-B_h|", "|rho-rho_h|", "|p-p_h|"
        );
        let with_orders = self.rows.len() > 1;
        if with_orders {
            let _ = write!(s, " {:>7} {:>7} {:>7} {:>7}", "o(u)", "o(B)", "o(rho)", "o(p)");
        }
        s.push('\n');
        for (i, (j, r)) in self.levels.iter().zip(&self.rows).enumerate() {
            let _ = write!(
                s,
                "{j:>3} {:>4} {:>10.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
                r.n, r.h, r.u, r.b, r.rho, r.p
            );
            if let Some(o) = i.checked_sub(1).map(|i| self.orders[i]) {
                let _ = write!(s, " {:>7.3} {:>7.3} {:>7.3} {:>7.3}", o[0], o[1], o[2], o[3]);
            }
            s.push('\n');
        }
        s
    }
}

/// Runs the 2D manufactured solution at each refinement level concurrently
/// and writes `mms.csv` into `cfg.output`.
pub fn cmd_mms(cfg: &RunConfig, levels: &[u32]) -> Result<MmsReport> {
    if cfg.dim != 2 || cfg.init != InitKind::Mms2d {
        return Err(Error::Config {
            line: 0,
            message: "mms requires dim = 2 and init = mms2d".into(),
        });
    }
    if levels.is_empty() {
        return Err(Error::Config {
            line: 0,
            message: "at least one refinement level is required".into(),
        });
    }
    let scheme = cfg.scheme_config();
    scheme.validate()?;
    let rows = thread::scope(|s| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&j| {
                let scheme = &scheme;
                s.spawn(move || run_mms(level_subdivisions(j), scheme))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("refinement level panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let report = MmsReport {
        levels: levels.to_vec(),
        orders: observed_orders(&rows),
        rows,
    };
    fs::create_dir_all(&cfg.output)?;
    fs::write(cfg.output.join("mms.csv"), report.csv())?;
    Ok(report)
}

/// Configuration of the 3D structure-preservation experiment on `n³` cubes.
pub fn preset_config(variable_density: bool, scheme: Scheme, upwind: bool, n: usize, output: PathBuf) -> RunConfig {
    let p = preset_3d(variable_density);
    RunConfig {
        dim: 3,
        n: [n; 3],
        scheme,
        upwind: upwind.then(UpwindParams::default),
        dt: p.dt,
        t_final: p.t_final,
        init: if variable_density {
            InitKind::Preset3dVariable
        } else {
            InitKind::Preset3dConstant
        },
        output,
        ..RunConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config { line: 1, message: String::new() }), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::StepFailure { iterations: 1, increment: 1.0 }), EXIT_SOLVER);
    }

    #[test]
    fn single_level_has_no_orders() {
        let report = MmsReport {
            levels: vec![1],
            rows: vec![MmsErrors { n: 6, h: 0.5, u: 1.0, b: 1.0, rho: 1.0, p: 1.0, div_defect: 0.0 }],
            orders: vec![],
        };
        let csv = report.csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(!csv.contains("order"));
        assert!(!report.text().contains("o(u)"));
    }

    #[test]
    fn orders_follow_error_ratios() {
        let row = |n, e| MmsErrors { n, h: 2.0 / n as f64, u: e, b: e, rho: e, p: e, div_defect: 0.0 };
        let rows = vec![row(6, 1.0), row(12, 0.5), row(24, 0.125)];
        let report = MmsReport { levels: vec![1, 2, 3], orders: observed_orders(&rows), rows };
        let csv = report.csv();
        let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
        assert_eq!(last.len(), 11);
        assert!((last[7].parse::<f64>().unwrap() - 2.0).abs() < 1e-14);
        assert!(csv.lines().nth(1).unwrap().ends_with(",,,,"));
    }

    #[test]
    fn preset_config_matches_experiment() {
        let cfg = preset_config(false, Scheme::A, true, 2, PathBuf::from("o"));
        assert_eq!(cfg.init, InitKind::Preset3dConstant);
        assert_eq!(cfg.scheme_config().num_steps(), 50);
        assert!(cfg.scheme_config().constant_density);
        assert_eq!(cfg.upwind, Some(UpwindParams::default()));
    }
}
