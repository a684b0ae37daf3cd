//! Discrete forms: the DG advection form `b_h`, its upwinded version, and the
//! auxiliary mass-matrix solves through which the trilinear form `a_h` is
//! realized.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{assemble, SparseMatrix};
use crate::mesh::Point;
use crate::spaces::{Discretization, Family, Field};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// `a_h(w, u, v) = ⟨w, ∇×π(u×v)⟩`; conserves everything but helicity.
    A,
    /// Composed projections; additionally conserves magnetic helicity.
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpwindKind {
    Abs,
    Smooth,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpwindParams {
    pub c: f64,
    pub eps: f64,
    pub kind: UpwindKind,
}

impl Default for UpwindParams {
    fn default() -> Self {
        Self {
            c: 0.5,
            eps: 0.01,
            kind: UpwindKind::Smooth,
        }
    }
}

impl UpwindParams {
    pub fn new(c: f64, eps: f64, kind: UpwindKind) -> Result<Self> {
        let p = Self { c, eps, kind };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.c) {
            return Err(Error::InvalidSpec(format!("upwind c = {} outside [0, 1/2]", self.c)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidSpec(format!("upwind eps = {} must be positive", self.eps)));
        }
        Ok(())
    }

    /// `β_e(u) / (u·n)` as a function of the normal velocity `u·n`.
    pub fn gamma(&self, un: f64) -> f64 {
        match self.kind {
            UpwindKind::Abs => {
                if un > 0.0 {
                    self.c
                } else if un < 0.0 {
                    -self.c
                } else {
                    0.0
                }
            }
            UpwindKind::Smooth => 2.0 * self.c / PI * (un / self.eps).atan(),
        }
    }

    /// `β_e(u)` itself.
    pub fn beta(&self, un: f64) -> f64 {
        self.gamma(un) * un
    }
}

/// Operators of one discretization plus the upwinding choice.
#[derive(Debug)]
pub struct FormCache {
    pub disc: Arc<Discretization>,
    pub upwind: Option<UpwindParams>,
    /// `(first cell, second cell, measure)` per RT0 dof (interior facet).
    facets: Vec<(usize, usize, f64)>,
}

/// Auxiliary fields of one sweep.
#[derive(Clone, Debug, Default)]
pub struct AuxFields {
    pub w: Vec<f64>,
    pub j: Vec<f64>,
    pub theta: Vec<f64>,
    /// Scheme B only.
    pub h: Vec<f64>,
    /// Scheme B only.
    pub u: Vec<f64>,
    pub e: Vec<f64>,
    /// Scheme B only.
    pub alpha: Vec<f64>,
    /// `⟨α, v⟩` (scheme B) or `⟨w×u − J×B, v⟩` (scheme A) per RT0 dof.
    pub lorentz: Vec<f64>,
}

/// Everything entering one evaluation of the discrete momentum equation.
#[derive(Clone, Copy, Debug)]
pub struct MomentumInputs<'a> {
    pub dt: f64,
    pub rho_k: &'a [f64],
    pub u_k: &'a [f64],
    pub rho_k1: &'a [f64],
    pub u_k1: &'a [f64],
    pub p: &'a [f64],
    pub aux: &'a AuxFields,
    /// Dropped (absorbed in the pressure) when `None`.
    pub rho_mid: Option<&'a [f64]>,
    /// Upwind ratios per facet, if upwinding.
    pub gammas: Option<&'a [f64]>,
    /// `⟨f_u, v⟩` per RT0 dof.
    pub forcing: Option<&'a [f64]>,
}

impl FormCache {
    pub fn new(disc: Arc<Discretization>, upwind: Option<UpwindParams>) -> Result<Self> {
        if let Some(p) = &upwind {
            p.validate()?;
        }
        let mesh = &disc.mesh;
        let facets = (0..disc.rt.ndofs())
            .map(|d| {
                let f = disc.rt.entity_of_dof(d);
                let (a, b) = mesh.facet_cells(f);
                (a, b.expect("interior facet"), mesh.facet_measure(f))
            })
            .collect();
        Ok(Self { disc, upwind, facets })
    }

    pub fn facets(&self) -> &[(usize, usize, f64)] {
        &self.facets
    }

    fn check_len(&self, x: &[f64], family: Family, context: &'static str) -> Result<()> {
        let n = self.disc.space(family).ndofs();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                context,
                expected: n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `b_h(f, g, u)` for DG0 `f`, `g` and RT0 `u`.
    pub fn bh(&self, f: &[f64], g: &[f64], u: &[f64]) -> Result<f64> {
        self.check_len(f, Family::Dg0, "b_h first argument")?;
        self.check_len(g, Family::Dg0, "b_h second argument")?;
        self.check_len(u, Family::Rt0, "b_h advecting field")?;
        Ok(self
            .facets
            .iter()
            .zip(u)
            .map(|(&(a, b, _), flux)| flux * (f[a] - f[b]) * 0.5 * (g[a] + g[b]))
            .sum())
    }

    /// Upwind ratios `γ_e(u_adv)` per facet; zero without upwinding.
    pub fn gammas(&self, u_adv: &[f64]) -> Vec<f64> {
        match &self.upwind {
            None => vec![0.0; self.facets.len()],
            Some(p) => self
                .facets
                .iter()
                .zip(u_adv)
                .map(|(&(_, _, meas), flux)| p.gamma(flux / meas))
                .collect(),
        }
    }

    /// `b̃_h(u_adv; f, g, v)`.
    pub fn bh_upwind(&self, u_adv: &[f64], f: &[f64], g: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(u_adv, Family::Rt0, "b̃_h advecting field")?;
        let base = self.bh(f, g, v)?;
        let gam = self.gammas(u_adv);
        let stab: f64 = self
            .facets
            .iter()
            .zip(v)
            .zip(&gam)
            .map(|((&(a, b, _), flux), gm)| gm * flux * (f[a] - f[b]) * (g[a] - g[b]))
            .sum();
        Ok(base + stab)
    }

    /// Matrix `G_ij = b̃_h(u; χ_i, χ_j, u)` of the density equation.
    pub fn density_matrix(&self, u: &[f64], gammas: &[f64]) -> SparseMatrix {
        let mut t = Vec::with_capacity(4 * self.facets.len());
        for ((&(a, b, _), &flux), &gm) in self.facets.iter().zip(u).zip(gammas) {
            let (p, m) = (flux * (0.5 + gm), flux * (0.5 - gm));
            t.extend([(a, a, p), (a, b, m), (b, a, -p), (b, b, -m)]);
        }
        assemble(self.disc.num_cells(), self.disc.num_cells(), &t).expect("cells in range")
    }

    /// `b̃_h(u; θ, ρ, φ_e)` for every RT0 basis function `φ_e`.
    pub fn momentum_advection(&self, theta: &[f64], rho: &[f64], gammas: &[f64]) -> Vec<f64> {
        self.facets
            .iter()
            .zip(gammas)
            .map(|(&(a, b, _), gm)| (theta[a] - theta[b]) * (0.5 * (rho[a] + rho[b]) + gm * (rho[a] - rho[b])))
            .collect()
    }

    /// `Σ_K ρ_K M_K u`, i.e. `⟨ρu, φ_i⟩`.
    pub fn weighted_rt_apply(&self, rho: &[f64], u: &[f64]) -> Vec<f64> {
        let d = &self.disc;
        let nl = d.tab_rt.nloc;
        let mut out = vec![0.0; d.rt.ndofs()];
        let local = d.rt_local_mass();
        for k in 0..d.num_cells() {
            let lu: Vec<f64> = (0..nl).map(|i| d.tab_rt.dof(k, i).map_or(0.0, |x| u[x])).collect();
            for i in 0..nl {
                if let Some(di) = d.tab_rt.dof(k, i) {
                    let s: f64 = (0..nl).map(|j| local[(k * nl + i) * nl + j] * lu[j]).sum();
                    out[di] += rho[k] * s;
                }
            }
        }
        out
    }

    /// `⟨w, z⟩ = ⟨ρu, ∇×z⟩`.
    pub fn aux_w(&self, rho: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.disc.curl.tr_mul_vec(&self.weighted_rt_apply(rho, u));
        self.disc.mass_solve(Family::Cg1, &rhs)
    }

    /// `⟨w, z⟩ = ⟨(ρ_a u_a + ρ_b u_b)/2, ∇×z⟩`.
    pub fn aux_w_mid(&self, rho_a: &[f64], u_a: &[f64], rho_b: &[f64], u_b: &[f64]) -> Result<Vec<f64>> {
        let ma = self.weighted_rt_apply(rho_a, u_a);
        let mb = self.weighted_rt_apply(rho_b, u_b);
        let m: Vec<f64> = ma.iter().zip(&mb).map(|(a, b)| 0.5 * (a + b)).collect();
        self.disc.mass_solve(Family::Cg1, &self.disc.curl.tr_mul_vec(&m))
    }

    /// `⟨J, K⟩ = ⟨B, ∇×K⟩`.
    pub fn aux_j(&self, b: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.disc.curl.tr_mul_vec(&self.disc.m_rt.mul_vec(b));
        self.disc.mass_solve(Family::Cg1, &rhs)
    }

    /// `⟨θ, τ⟩ = ½⟨u_a · u_b, τ⟩`.
    pub fn aux_theta(&self, u_a: &[f64], u_b: &[f64]) -> Vec<f64> {
        self.disc
            .rt_cell_products(u_a, u_b)
            .iter()
            .zip(&self.disc.volumes)
            .map(|(p, v)| 0.5 * p / v)
            .collect()
    }

    /// NED0 projection of an RT0 field (`H` from `B`, `U` from `u`).
    pub fn aux_ned_projection(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.disc.mass_solve(Family::Ned0, &self.disc.m_mix.mul_vec(x))
    }

    pub fn aux_h(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.aux_ned_projection(b)
    }

    pub fn aux_u(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.aux_ned_projection(u)
    }

    /// `⟨E, F⟩ = −⟨x × y, F⟩` with `x`, `y` in the given family (NED0 for
    /// scheme B, RT0 for scheme A).
    pub fn aux_e(&self, family: Family, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let d = &self.disc;
        let tab = d.tabulation(family);
        let xv = d.eval_qp(tab, x);
        let yv = d.eval_qp(tab, y);
        let g: Vec<Point> = xv.iter().zip(&yv).map(|(a, b)| -a.cross(b)).collect();
        let rhs = d.test_against(&d.tab_curl, d.curl_space.ndofs(), &g);
        d.mass_solve(Family::Cg1, &rhs)
    }

    /// `⟨w × x − J × y, ·⟩` tested against the given family, where `x`, `y`
    /// live in `field_family`.
    pub fn lorentz_load(&self, w: &[f64], j: &[f64], field_family: Family, x: &[f64], y: &[f64], test: Family) -> Vec<f64> {
        let d = &self.disc;
        let wv = d.eval_qp(&d.tab_curl, w);
        let jv = d.eval_qp(&d.tab_curl, j);
        let tab = d.tabulation(field_family);
        let xv = d.eval_qp(tab, x);
        let yv = d.eval_qp(tab, y);
        let g: Vec<Point> = (0..wv.len()).map(|q| wv[q].cross(&xv[q]) - jv[q].cross(&yv[q])).collect();
        d.test_against(d.tabulation(test), d.space(test).ndofs(), &g)
    }

    /// `⟨α, β⟩ = ⟨w × U − J × H, β⟩`.
    pub fn aux_alpha(&self, w: &[f64], uu: &[f64], j: &[f64], h: &[f64]) -> Result<Vec<f64>> {
        let rhs = self.lorentz_load(w, j, Family::Ned0, uu, h, Family::Ned0);
        self.disc.mass_solve(Family::Ned0, &rhs)
    }

    /// All auxiliary fields for the step `k → k+1` at the current iterate.
    #[allow(clippy::too_many_arguments)]
    pub fn compute_aux(
        &self,
        scheme: Scheme,
        rho_k: &[f64],
        u_k: &[f64],
        b_k: &[f64],
        rho_k1: &[f64],
        u_k1: &[f64],
        b_k1: &[f64],
    ) -> Result<AuxFields> {
        let mid = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect() };
        let u_mid = mid(u_k, u_k1);
        let b_mid = mid(b_k, b_k1);
        let w = self.aux_w_mid(rho_k, u_k, rho_k1, u_k1)?;
        let j = self.aux_j(&b_mid)?;
        let theta = self.aux_theta(u_k, u_k1);
        match scheme {
            Scheme::B => {
                let h = self.aux_h(&b_mid)?;
                let uu = self.aux_u(&u_mid)?;
                let e = self.aux_e(Family::Ned0, &uu, &h)?;
                let alpha = self.aux_alpha(&w, &uu, &j, &h)?;
                let lorentz = self.disc.m_mix.tr_mul_vec(&alpha);
                Ok(AuxFields {
                    w,
                    j,
                    theta,
                    h,
                    u: uu,
                    e,
                    alpha,
                    lorentz,
                })
            }
            Scheme::A => {
                let e = self.aux_e(Family::Rt0, &u_mid, &b_mid)?;
                let lorentz = self.lorentz_load(&w, &j, Family::Rt0, &u_mid, &b_mid, Family::Rt0);
                Ok(AuxFields {
                    w,
                    j,
                    theta,
                    e,
                    lorentz,
                    ..Default::default()
                })
            }
        }
    }

    /// Weak residual of the discrete momentum equation against every RT0
    /// basis function.
    pub fn momentum_residual(&self, inp: &MomentumInputs) -> Vec<f64> {
        let m1 = self.weighted_rt_apply(inp.rho_k1, inp.u_k1);
        let m0 = self.weighted_rt_apply(inp.rho_k, inp.u_k);
        let pdiv = self.disc.div.tr_mul_vec(inp.p);
        let mut r: Vec<f64> = (0..m1.len())
            .map(|i| (m1[i] - m0[i]) / inp.dt + inp.aux.lorentz[i] - pdiv[i])
            .collect();
        if let Some(rho_mid) = inp.rho_mid {
            let zeros;
            let gam = match inp.gammas {
                Some(g) => g,
                None => {
                    zeros = vec![0.0; r.len()];
                    &zeros
                }
            };
            let adv = self.momentum_advection(&inp.aux.theta, rho_mid, gam);
            for (ri, a) in r.iter_mut().zip(adv) {
                *ri += a;
            }
        }
        if let Some(f) = inp.forcing {
            for (ri, fi) in r.iter_mut().zip(f) {
                *ri -= fi;
            }
        }
        r
    }

    /// Field-level `b_h`.
    pub fn bh_fields(&self, f: &Field, g: &Field, u: &Field) -> Result<f64> {
        for (x, fam) in [(f, Family::Dg0), (g, Family::Dg0), (u, Family::Rt0)] {
            if x.space().family() != fam || !Arc::ptr_eq(x.space().mesh(), &self.disc.mesh) {
                return Err(Error::SpaceMismatch(format!("expected a {fam:?} field on this mesh")));
            }
        }
        self.bh(f.coeffs(), g.coeffs(), u.coeffs())
    }
}
