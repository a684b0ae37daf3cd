//! Manufactured solutions and experiment presets.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::diagnostics::{l2_error, Exact};
use crate::error::Result;
use crate::mesh::{build_box_mesh, BoxSpec, Point};
use crate::spaces::{Discretization, Family};
use crate::stepper::{init_state, Forcing, ForcingLoads, MagneticInit, SchemeConfig, Stepper};

/// 2×2 Jacobian, `j[i][k] = ∂_k v_i`.
type Jac = [[f64; 2]; 2];

fn apply(j: &Jac, v: &Point) -> Point {
    Point::new(j[0][0] * v.x + j[0][1] * v.y, j[1][0] * v.x + j[1][1] * v.y, 0.0)
}

fn apply_t(j: &Jac, v: &Point) -> Point {
    Point::new(j[0][0] * v.x + j[1][0] * v.y, j[0][1] * v.x + j[1][1] * v.y, 0.0)
}

fn lin(a: f64, ja: &Jac, b: f64, jb: &Jac) -> Jac {
    let mut j = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            j[i][k] = a * ja[i][k] + b * jb[i][k];
        }
    }
    j
}

/// The two divergence-free building blocks and their Jacobians.
fn basis(x: &Point) -> (Point, Jac, Point, Jac) {
    let (hx, hy) = (PI * x.x / 2.0, PI * x.y / 2.0);
    let (ch, sh, cv, sv) = (hx.cos(), hx.sin(), hy.cos(), hy.sin());
    let a = Point::new(ch * sv, -sh * cv, 0.0);
    let ja = [
        [-PI / 2.0 * sh * sv, PI / 2.0 * ch * cv],
        [-PI / 2.0 * ch * cv, PI / 2.0 * sh * sv],
    ];
    let (cx, sx, cy, sy) = ((PI * x.x).cos(), (PI * x.x).sin(), (PI * x.y).cos(), (PI * x.y).sin());
    let b = Point::new(sx * cy, -cx * sy, 0.0);
    let jb = [[PI * cx * cy, -PI * sx * sy], [PI * sx * sy, -PI * cx * cy]];
    (a, ja, b, jb)
}

/// The 2D manufactured solution on `[−1, 1]²`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MmsCase;

pub fn mms_2d() -> MmsCase {
    MmsCase
}

impl MmsCase {
    pub fn domain(&self) -> BoxSpec {
        BoxSpec::new([-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [1, 1, 1])
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn u(&self, x: &Point, t: f64) -> Point {
        let (a, _, b, _) = basis(x);
        a * t.cos() + b * t.sin()
    }

    pub fn b(&self, x: &Point, t: f64) -> Point {
        let (a, _, b, _) = basis(x);
        a * -t.sin() + b * t.cos()
    }

    pub fn rho(&self, x: &Point, t: f64) -> f64 {
        let (cx, sx, cy, sy) = ((PI * x.x).cos(), (PI * x.x).sin(), (PI * x.y).cos(), (PI * x.y).sin());
        2.0 + t.cos() * sx * cy + t.sin() * cx * sy
    }

    fn grad_rho(&self, x: &Point, t: f64) -> Point {
        let (cx, sx, cy, sy) = ((PI * x.x).cos(), (PI * x.x).sin(), (PI * x.y).cos(), (PI * x.y).sin());
        let g1 = Point::new(PI * cx * cy, -PI * sx * sy, 0.0);
        let g2 = Point::new(-PI * sx * sy, PI * cx * cy, 0.0);
        g1 * t.cos() + g2 * t.sin()
    }

    pub fn p(&self, x: &Point, t: f64) -> f64 {
        self.rho(x, t) * self.u(x, t).norm_squared() - 1.0
    }

    /// Pressure of the reformulated momentum equation, `p + ρ|u|²`.
    pub fn p_total(&self, x: &Point, t: f64) -> f64 {
        self.p(x, t) + self.rho(x, t) * self.u(x, t).norm_squared()
    }

    /// Stream function of `B`: `B = (∂_y ψ, −∂_x ψ)`, zero on the boundary.
    pub fn b_stream(&self, x: &Point, t: f64) -> f64 {
        let phi_a = -2.0 / PI * (PI * x.x / 2.0).cos() * (PI * x.y / 2.0).cos();
        let phi_b = (PI * x.x).sin() * (PI * x.y).sin() / PI;
        -t.sin() * phi_a + t.cos() * phi_b
    }

    /// `(f_u, f_B, f_ρ)` for the strong equations
    /// `ρ(∂_t u + u·∇u) − (∇×B)×B + ∇p = f_u`, `∂_t B − ∇×(u×B) = f_B`,
    /// `∂_t ρ + div(ρu) = f_ρ`.
    pub fn forcing(&self, x: &Point, t: f64) -> (Point, Point, f64) {
        let (a, ja, b, jb) = basis(x);
        let (c, s) = (t.cos(), t.sin());
        let u = a * c + b * s;
        let bf = a * -s + b * c;
        let ju = lin(c, &ja, s, &jb);
        let jbf = lin(-s, &ja, c, &jb);
        let ut = a * -s + b * c;
        let bt = a * -c + b * -s;
        let rho = self.rho(x, t);
        let grho = self.grad_rho(x, t);
        let (cx, sx, cy, sy) = ((PI * x.x).cos(), (PI * x.x).sin(), (PI * x.y).cos(), (PI * x.y).sin());
        let rho_t = -s * sx * cy + c * cx * sy;

        let f_rho = rho_t + u.dot(&grho);

        let omega = jbf[1][0] - jbf[0][1];
        let lorentz = Point::new(omega * bf.y, -omega * bf.x, 0.0);
        let grad_p = grho * u.norm_squared() + apply_t(&ju, &u) * (2.0 * rho);
        let f_u = (ut + apply(&ju, &u)) * rho + lorentz + grad_p;

        let grad_phi = apply_t(&ju, &Point::new(bf.y, -bf.x, 0.0)) + apply_t(&jbf, &Point::new(-u.y, u.x, 0.0));
        let f_b = bt - Point::new(grad_phi.y, -grad_phi.x, 0.0);
        (f_u, f_b, f_rho)
    }

    /// Momentum forcing of the conservative reformulation, `f_u + u f_ρ`.
    pub fn momentum_forcing(&self, x: &Point, t: f64) -> Point {
        let (f_u, _, f_rho) = self.forcing(x, t);
        f_u + self.u(x, t) * f_rho
    }
}

impl Forcing for MmsCase {
    fn loads(&self, disc: &Discretization, t_mid: f64) -> Result<ForcingLoads> {
        let fu: Vec<Point> = disc.qpoints.iter().map(|x| self.momentum_forcing(x, t_mid)).collect();
        let momentum = disc.test_against(&disc.tab_rt, disc.rt.ndofs(), &fu);
        let fr: Vec<f64> = disc.qpoints.iter().map(|x| self.forcing(x, t_mid).2).collect();
        let density = disc.cell_integrals(&fr);
        let magnetic = disc.project_divfree(|x| self.forcing(x, t_mid).1)?;
        Ok(ForcingLoads {
            momentum,
            density,
            magnetic,
        })
    }
}

/// L² errors of one manufactured-solution run at its final time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmsErrors {
    /// Squares per side.
    pub n: usize,
    /// Maximum cell diameter.
    pub h: f64,
    pub u: f64,
    pub b: f64,
    pub rho: f64,
    pub p: f64,
    /// Largest cellwise divergence defect over all steps.
    pub div_defect: f64,
}

/// Squares per side of refinement level `j`: the coarsest uniform mesh of
/// `[-1,1]²` with maximum cell diameter at most `2^-j`.
pub fn level_subdivisions(j: u32) -> usize {
    3 << j
}

/// Runs the 2D manufactured solution on an `n × n` mesh to `config.t_final`.
///
/// The discrete pressure approximates `p + ρ|u|²` (the pressure of the
/// reformulated momentum equation) up to its mean, and is compared with it.
pub fn run_mms(n: usize, config: &SchemeConfig) -> Result<MmsErrors> {
    let case = mms_2d();
    let mut spec = case.domain();
    spec.subdivisions = [n, n, 1];
    let mesh = Arc::new(build_box_mesh(&spec, 2)?);
    let disc = Arc::new(Discretization::new(mesh)?);
    let s0 = init_state(
        &disc,
        &|x| case.u(x, 0.0),
        MagneticInit::Potential(&|x| Point::new(0.0, 0.0, case.b_stream(x, 0.0))),
        &|x| case.rho(x, 0.0),
    )?;
    let stepper = Stepper::new(disc.clone(), config.clone())?;
    let mut div_defect = 0.0f64;
    let out = stepper.run(s0, Some(&case), |_, _, _, r| div_defect = div_defect.max(r.div_defect))?;
    let s = out.state;
    let t = s.t;
    let pmean = domain_mean(&disc, |x| case.p_total(x, t));
    Ok(MmsErrors {
        n,
        h: disc.mesh.max_diameter(),
        u: l2_error(&disc, Family::Rt0, &s.u, Exact::Vector(&|x| case.u(x, t))),
        b: l2_error(&disc, Family::Rt0, &s.b, Exact::Vector(&|x| case.b(x, t))),
        rho: l2_error(&disc, Family::Dg0, &s.rho, Exact::Scalar(&|x| case.rho(x, t))),
        p: l2_error(&disc, Family::Dg0, &s.p, Exact::Scalar(&|x| case.p_total(x, t) - pmean)),
        div_defect,
    })
}

/// Observed orders `log₂(e_j / e_{j+1})` between consecutive rows, per field
/// `[u, B, ρ, p]`, scaled by the actual ratio of mesh sizes.
pub fn observed_orders(rows: &[MmsErrors]) -> Vec<[f64; 4]> {
    rows.windows(2)
        .map(|w| {
            let r = (w[0].h / w[1].h).ln();
            let o = |a: f64, b: f64| (a / b).ln() / r;
            [o(w[0].u, w[1].u), o(w[0].b, w[1].b), o(w[0].rho, w[1].rho), o(w[0].p, w[1].p)]
        })
        .collect()
}

/// Initial data of the 3D structure-preservation experiment on `[−1, 1]³`.
#[derive(Clone, Copy, Debug)]
pub struct Preset3D {
    pub variable_density: bool,
    pub dt: f64,
    pub t_final: f64,
}

pub fn preset_3d(variable_density: bool) -> Preset3D {
    Preset3D {
        variable_density,
        dt: 0.02,
        t_final: 1.0,
    }
}

impl Preset3D {
    pub fn u0(&self, x: &Point) -> Point {
        let e = (-4.0 * (x.x * x.x + x.y * x.y)).exp();
        Point::new(x.y * e, -x.x * e, 0.0)
    }

    /// Vector potential of `B₀`; vanishes on the boundary.
    pub fn a0(&self, x: &Point) -> Point {
        let bump = (1.0 - x.x * x.x) * (1.0 - x.y * x.y) * (1.0 - x.z * x.z);
        Point::new((PI * x.x).sin(), (PI * x.y).sin(), (PI * x.z).sin()) * (0.5 * bump)
    }

    pub fn rho0(&self, x: &Point) -> f64 {
        if self.variable_density {
            2.0 + (x.x * x.y).sin()
        } else {
            1.0
        }
    }

    pub fn domain(&self, n: usize) -> BoxSpec {
        BoxSpec::cube(-1.0, 1.0, n)
    }
}

/// Mean of `f` over the mesh by the volume rule.
pub fn domain_mean(disc: &Discretization, f: impl Fn(&Point) -> f64) -> f64 {
    let g: Vec<f64> = disc.qpoints.iter().map(f).collect();
    let total: f64 = disc.cell_integrals(&g).iter().sum();
    total / disc.volumes.iter().sum::<f64>()
}
