//! Midpoint-type time stepping with a Gauss–Seidel fixed-point iteration.

use std::sync::Arc;

use crate::diagnostics::{invariants, InvariantRecord};
use crate::error::{Error, Result};
use crate::forms::{FormCache, Scheme, UpwindParams};
use crate::linalg::{assemble, factorize, SaddleSystem, SparseMatrix};
use crate::mesh::Point;
use crate::spaces::{Discretization, Family};

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub upwind: Option<UpwindParams>,
    pub dt: f64,
    pub t_final: f64,
    pub fp_tol: f64,
    pub fp_maxiter: usize,
    pub constant_density: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::B,
            upwind: None,
            dt: 0.01,
            t_final: 1.0,
            fp_tol: 1e-12,
            fp_maxiter: 100,
            constant_density: false,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidSpec(format!("time step {} must be positive", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidSpec(format!("final time {} must be nonnegative", self.t_final)));
        }
        if !(self.fp_tol > 0.0) {
            return Err(Error::InvalidSpec(format!("fixed-point tolerance {} must be positive", self.fp_tol)));
        }
        if self.fp_maxiter == 0 {
            return Err(Error::InvalidSpec("at least one fixed-point sweep is required".into()));
        }
        if let Some(p) = &self.upwind {
            p.validate()?;
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_final`.
    pub fn num_steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub k: usize,
    pub t: f64,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
}

/// Initial magnetic field.
pub enum MagneticInit<'a> {
    /// `B₀ = ∇×A₀` through the curl-space interpolant of `A₀`; in 2D only the
    /// out-of-plane component of `A₀` is used.
    Potential(&'a dyn Fn(&Point) -> Point),
    /// Divergence-free projection of `B₀`.
    Field(&'a dyn Fn(&Point) -> Point),
}

/// Builds the discrete initial state.
pub fn init_state(
    disc: &Discretization,
    u0: &dyn Fn(&Point) -> Point,
    b0: MagneticInit,
    rho0: &dyn Fn(&Point) -> f64,
) -> Result<State> {
    let u = disc.project_divfree(u0)?;
    let b = match b0 {
        MagneticInit::Potential(a) => {
            let fam = if disc.dim() == 3 { Family::Ned0 } else { Family::Cg1 };
            disc.curl.mul_vec(&disc.interpolate(fam, a)?)
        }
        MagneticInit::Field(f) => disc.project_divfree(f)?,
    };
    let rho = disc.project_scalar(Family::Dg0, rho0)?;
    Ok(State {
        k: 0,
        t: 0.0,
        u,
        b,
        rho,
        p: vec![0.0; disc.num_cells()],
    })
}

/// Right-hand side contributions of a manufactured solution over one step.
#[derive(Clone, Debug)]
pub struct ForcingLoads {
    /// `⟨F_u, v⟩` per RT0 dof.
    pub momentum: Vec<f64>,
    /// `⟨f_ρ, σ⟩` per cell.
    pub density: Vec<f64>,
    /// Divergence-free RT0 rate added to `B`.
    pub magnetic: Vec<f64>,
}

pub trait Forcing {
    /// Loads for the step ending at `t_k + dt`, given `t_mid = t_k + dt/2`.
    fn loads(&self, disc: &Discretization, t_mid: f64) -> Result<ForcingLoads>;
}

/// The unknowns at `t_{k+1}` during the fixed-point iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Iterate {
    pub u: Vec<f64>,
    pub b: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub iterations: usize,
    pub increment: f64,
}

pub struct Stepper {
    pub forms: FormCache,
    pub config: SchemeConfig,
    /// Saddle system for `M/Δt` when density is constant in time.
    constant_saddle: Option<SaddleSystem>,
    neg_div: SparseMatrix,
}

impl Stepper {
    pub fn new(disc: Arc<Discretization>, config: SchemeConfig) -> Result<Self> {
        config.validate()?;
        let forms = FormCache::new(disc, config.upwind)?;
        let neg_div = forms.disc.div.scaled(-1.0);
        let constant_saddle = if config.constant_density {
            let a = forms.disc.m_rt.scaled(1.0 / config.dt);
            Some(SaddleSystem::new(&a, &neg_div, Some(&forms.disc.volumes), "momentum saddle system")?)
        } else {
            None
        };
        Ok(Self {
            forms,
            config,
            constant_saddle,
            neg_div,
        })
    }

    pub fn disc(&self) -> &Arc<Discretization> {
        &self.forms.disc
    }

    /// One Gauss–Seidel sweep: auxiliary fields, then `ρ`, then `B`, then
    /// `(u, p)` with the upwind weights frozen.
    pub fn fixed_point_sweep(&self, state: &State, it: &Iterate, loads: Option<&ForcingLoads>) -> Result<Iterate> {
        let disc = &self.forms.disc;
        let dt = self.config.dt;
        let nc = disc.num_cells();
        let aux = self.forms.compute_aux(self.config.scheme, &state.rho, &state.u, &state.b, &it.rho, &it.u, &it.b)?;
        let u_mid: Vec<f64> = state.u.iter().zip(&it.u).map(|(a, b)| 0.5 * (a + b)).collect();
        let gammas = self.forms.gammas(&u_mid);

        let rho = if self.config.constant_density {
            state.rho.clone()
        } else {
            let g = self.forms.density_matrix(&u_mid, &gammas);
            let mut t: Vec<(usize, usize, f64)> = g.triplets().map(|(r, c, v)| (r, c, 0.5 * v)).collect();
            t.extend((0..nc).map(|k| (k, k, disc.volumes[k] / dt)));
            let lhs = assemble(nc, nc, &t)?;
            let gr = g.mul_vec(&state.rho);
            let mut rhs: Vec<f64> = (0..nc).map(|k| disc.volumes[k] / dt * state.rho[k] - 0.5 * gr[k]).collect();
            if let Some(l) = loads {
                rhs.iter_mut().zip(&l.density).for_each(|(r, f)| *r += f);
            }
            factorize(&lhs, "density system")?.solve(&rhs)?
        };

        let ce = disc.curl.mul_vec(&aux.e);
        let mut b: Vec<f64> = state.b.iter().zip(&ce).map(|(b, c)| b - dt * c).collect();
        if let Some(l) = loads {
            b.iter_mut().zip(&l.magnetic).for_each(|(b, f)| *b += dt * f);
        }

        let m0 = self.forms.weighted_rt_apply(&state.rho, &state.u);
        let mut rhs: Vec<f64> = m0.iter().zip(&aux.lorentz).map(|(m, l)| m / dt - l).collect();
        if !self.config.constant_density {
            let rho_mid: Vec<f64> = state.rho.iter().zip(&rho).map(|(a, b)| 0.5 * (a + b)).collect();
            let adv = self.forms.momentum_advection(&aux.theta, &rho_mid, &gammas);
            rhs.iter_mut().zip(&adv).for_each(|(r, a)| *r -= a);
        }
        if let Some(l) = loads {
            rhs.iter_mut().zip(&l.momentum).for_each(|(r, f)| *r += f);
        }
        let zeros = vec![0.0; nc];
        let (u, p) = match &self.constant_saddle {
            Some(s) => s.solve(&rhs, &zeros)?,
            None => {
                let a = disc.weighted_rt_mass(&rho).scaled(1.0 / dt);
                SaddleSystem::new(&a, &self.neg_div, Some(&disc.volumes), "momentum saddle system")?.solve(&rhs, &zeros)?
            }
        };
        Ok(Iterate { u, b, rho, p })
    }

    /// Relative L² increment between two iterates, maximized over `u`, `B`, `ρ`.
    pub fn increment(&self, old: &Iterate, new: &Iterate) -> f64 {
        let disc = &self.forms.disc;
        let rel_rt = |a: &[f64], b: &[f64]| {
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let n = disc.m_rt.bilinear(b, b).sqrt();
            let dn = disc.m_rt.bilinear(&d, &d).sqrt();
            if dn == 0.0 {
                0.0
            } else {
                dn / n.max(f64::MIN_POSITIVE)
            }
        };
        let (mut dn, mut n) = (0.0, 0.0);
        for ((a, b), v) in old.rho.iter().zip(&new.rho).zip(&disc.volumes) {
            dn += (a - b) * (a - b) * v;
            n += b * b * v;
        }
        let rho_inc = if dn == 0.0 { 0.0 } else { dn.sqrt() / n.sqrt().max(f64::MIN_POSITIVE) };
        rel_rt(&old.u, &new.u).max(rel_rt(&old.b, &new.b)).max(rho_inc)
    }

    /// Advances one time step.
    pub fn step(&self, state: &State, forcing: Option<&dyn Forcing>) -> Result<(State, StepInfo)> {
        let dt = self.config.dt;
        let loads = forcing.map(|f| f.loads(&self.forms.disc, state.t + 0.5 * dt)).transpose()?;
        let mut it = Iterate {
            u: state.u.clone(),
            b: state.b.clone(),
            rho: state.rho.clone(),
            p: state.p.clone(),
        };
        let mut inc = f64::INFINITY;
        for n in 1..=self.config.fp_maxiter {
            let next = self.fixed_point_sweep(state, &it, loads.as_ref())?;
            inc = self.increment(&it, &next);
            it = next;
            if !inc.is_finite() {
                break;
            }
            if inc < self.config.fp_tol {
                let new = State {
                    k: state.k + 1,
                    t: (state.k + 1) as f64 * dt,
                    u: it.u,
                    b: it.b,
                    rho: it.rho,
                    p: it.p,
                };
                return Ok((
                    new,
                    StepInfo {
                        iterations: n,
                        increment: inc,
                    },
                ));
            }
        }
        Err(Error::StepFailure {
            iterations: self.config.fp_maxiter,
            increment: inc,
        })
    }

    /// Invariants of a state.
    pub fn record(&self, state: &State, fp_iters: usize) -> InvariantRecord {
        invariants(&self.forms.disc, state.t, &state.u, &state.b, &state.rho, fp_iters)
    }

    /// Steps from `state` to `t_final`, calling `observer` with the initial
    /// state (`k = 0`) and after every accepted step.
    pub fn run(
        &self,
        state: State,
        forcing: Option<&dyn Forcing>,
        mut observer: impl FnMut(usize, f64, &State, &InvariantRecord),
    ) -> Result<RunOutput> {
        let mut records = Vec::new();
        let rec = self.record(&state, 0);
        observer(state.k, state.t, &state, &rec);
        records.push(rec);
        let mut state = state;
        for _ in 0..self.config.num_steps() {
            let (next, info) = self.step(&state, forcing)?;
            let rec = self.record(&next, info.iterations);
            observer(next.k, next.t, &next, &rec);
            records.push(rec);
            state = next;
        }
        Ok(RunOutput { records, state })
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<InvariantRecord>,
    pub state: State,
}
