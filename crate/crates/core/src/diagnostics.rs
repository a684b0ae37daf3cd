//! Conserved quantities, constraint norms and error norms.

use crate::error::{Error, Result};
use crate::linalg::conjugate_gradient;
use crate::mesh::Point;
use crate::quadrature::collapsed_rule;
use crate::spaces::{Discretization, Family};

const POTENTIAL_TOL: f64 = 1e-13;

/// The invariants of one state together with the norms used to scale their
/// drift.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantRecord {
    pub t: f64,
    pub mass: f64,
    pub rho2: f64,
    pub energy: f64,
    pub cross_helicity: f64,
    /// `None` in 2D and when the potential solve fails.
    pub magnetic_helicity: Option<f64>,
    pub div_u_l2: f64,
    pub div_b_l2: f64,
    pub fp_iters: usize,
    /// `‖u‖`, `‖B‖` and `‖A‖` in L².
    pub u_norm: f64,
    pub b_norm: f64,
    pub a_norm: Option<f64>,
    /// Largest cellwise `|div u|` or `|div B|`, each over `1 + ‖field‖`.
    pub div_defect: f64,
}

impl InvariantRecord {
    /// CSV row matching [`CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        let h = self.magnetic_helicity.map_or_else(|| "nan".to_string(), |h| format!("{h:.16e}"));
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e},{}",
            self.t, self.mass, self.rho2, self.energy, self.cross_helicity, h, self.div_u_l2, self.div_b_l2, self.fp_iters
        )
    }
}

pub const CSV_HEADER: &str = "t,mass,rho2,energy,cross_helicity,magnetic_helicity,div_u_l2,div_B_l2,fp_iters";

/// Drift of each invariant between two records, `[mass, rho2, energy,
/// cross_helicity, magnetic_helicity]`, relative to the initial record.
/// Mass, squared density and energy are scaled by their initial values;
/// the helicities, which may vanish initially, by the Cauchy–Schwarz bounds
/// `‖u‖‖B‖` and `‖A‖‖B‖`.
pub fn relative_drift(initial: &InvariantRecord, current: &InvariantRecord) -> [Option<f64>; 5] {
    let rel = |a: f64, b: f64, scale: f64| Some((b - a).abs() / scale.abs().max(f64::MIN_POSITIVE));
    let helicity = match (initial.magnetic_helicity, current.magnetic_helicity, initial.a_norm) {
        (Some(a), Some(b), Some(an)) => rel(a, b, an * initial.b_norm),
        _ => None,
    };
    [
        rel(initial.mass, current.mass, initial.mass),
        rel(initial.rho2, current.rho2, initial.rho2),
        rel(initial.energy, current.energy, initial.energy),
        rel(initial.cross_helicity, current.cross_helicity, initial.u_norm * initial.b_norm),
        helicity,
    ]
}

/// A discrete vector potential: NED0 coefficients with `C a = B`.
///
/// Solves the singular system `⟨∇×A, ∇×V⟩ = ⟨B, ∇×V⟩` by conjugate gradients
/// from zero.
pub fn recover_potential(disc: &Discretization, b: &[f64]) -> Result<Vec<f64>> {
    if disc.dim() != 3 {
        return Err(Error::SpaceMismatch("vector potentials are recovered in 3D only".into()));
    }
    let c = &disc.curl;
    let m = &disc.m_rt;
    let rhs = c.tr_mul_vec(&m.mul_vec(b));
    let (a, _) = conjugate_gradient(|x| c.tr_mul_vec(&m.mul_vec(&c.mul_vec(x))), &rhs, POTENTIAL_TOL, 20 * rhs.len() + 100)?;
    Ok(a)
}

/// `∫ A·B` for NED0 `a` and RT0 `b`.
pub fn helicity_of(disc: &Discretization, a: &[f64], b: &[f64]) -> f64 {
    disc.m_mix.bilinear(a, b)
}

/// All invariants of `(u, B, ρ)`.
/// `max_K |div x|_K / (1 + ‖x‖)` for an RT0 field.
pub fn div_defect(disc: &Discretization, x: &[f64]) -> f64 {
    let scale = 1.0 + disc.m_rt.bilinear(x, x).sqrt();
    disc.divergence(x).iter().fold(0.0f64, |m, d| m.max(d.abs())) / scale
}

pub fn invariants(disc: &Discretization, t: f64, u: &[f64], b: &[f64], rho: &[f64], fp_iters: usize) -> InvariantRecord {
    let mass: f64 = rho.iter().zip(&disc.volumes).map(|(r, v)| r * v).sum();
    let rho2: f64 = rho.iter().zip(&disc.volumes).map(|(r, v)| r * r * v).sum();
    let uu = disc.m_rt.bilinear(u, u);
    let bb = disc.m_rt.bilinear(b, b);
    let energy = 0.5 * (disc.weighted_rt_product(rho, u, u) + bb);
    let cross_helicity = disc.m_rt.bilinear(u, b);
    let div_l2 = |x: &[f64]| -> f64 {
        disc.divergence(x)
            .iter()
            .zip(&disc.volumes)
            .map(|(d, v)| d * d * v)
            .sum::<f64>()
            .sqrt()
    };
    let (magnetic_helicity, a_norm) = if disc.dim() == 3 {
        match recover_potential(disc, b) {
            Ok(a) => (Some(helicity_of(disc, &a, b)), Some(disc.m_ned.bilinear(&a, &a).sqrt())),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    InvariantRecord {
        t,
        mass,
        rho2,
        energy,
        cross_helicity,
        magnetic_helicity,
        div_u_l2: div_l2(u),
        div_b_l2: div_l2(b),
        fp_iters,
        u_norm: uu.sqrt(),
        b_norm: bb.sqrt(),
        a_norm,
        div_defect: div_defect(disc, u).max(div_defect(disc, b)),
    }
}

/// Analytic target of an error measurement.
pub enum Exact<'a> {
    Scalar(&'a dyn Fn(&Point) -> f64),
    Vector(&'a dyn Fn(&Point) -> Point),
}

/// `‖x_h − f‖_{L²}` using a degree-8 rule on every cell.
pub fn l2_error(disc: &Discretization, family: Family, coeffs: &[f64], exact: Exact) -> f64 {
    let mesh = &disc.mesh;
    let rule = collapsed_rule(disc.dim(), 8);
    let space = disc.space(family);
    let mut sum = 0.0;
    for k in 0..mesh.num_cells() {
        let dofs = space.cell_dofs(k);
        let vol = mesh.cell_volume(k);
        for (lam, w) in rule.points.iter().zip(&rule.weights) {
            let x = mesh.point_from_barycentric(k, lam);
            let vals = space.basis_values(k, lam);
            let v: Point = dofs.iter().zip(&vals).filter_map(|(d, phi)| d.map(|d| phi * coeffs[d])).sum();
            let e2 = match (&exact, family) {
                (Exact::Scalar(f), Family::Dg0) => (v.x - f(&x)).powi(2),
                (Exact::Scalar(f), Family::Cg1) => (v.z - f(&x)).powi(2),
                (Exact::Vector(f), _) => (v - f(&x)).norm_squared(),
                (Exact::Scalar(_), _) => panic!("scalar target for a vector family"),
            };
            sum += w * vol * e2;
        }
    }
    sum.sqrt()
}
