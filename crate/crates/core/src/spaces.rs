//! Lowest-order finite element spaces and the operators built on them.
//!
//! All vector values use a 3-component representation. In 2D, in-plane
//! fields (`RT0`, `NED0`) have a zero `z` component and the scalar curl space
//! (`CG1`) is represented by the out-of-plane field `(0, 0, f)`. With that
//! embedding the ordinary cross product and curl reproduce the planar
//! conventions `rot f = (∂y f, −∂x f)`, `curl u = ∂x u_y − ∂y u_x`,
//! `u × v = u_x v_y − u_y v_x` and `w × u = w (−u_y, u_x)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{assemble, factorize, FactorHandle, SaddleSystem, SparseMatrix};
use crate::mesh::{local_edges, Mesh, Point};
use crate::quadrature::{gauss_legendre, volume_rule, SimplexRule};

const INSIDE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Raviart–Thomas, one normal flux per facet.
    Rt0,
    /// Nédélec (first kind), one tangential circulation per edge.
    Ned0,
    /// Piecewise constants.
    Dg0,
    /// Continuous piecewise-linear scalars vanishing on the boundary (2D only).
    Cg1,
}

impl Family {
    pub fn is_scalar(self) -> bool {
        matches!(self, Family::Dg0 | Family::Cg1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Scalar(f64),
    Vector(Point),
}

impl Value {
    pub fn scalar(self) -> f64 {
        match self {
            Value::Scalar(s) => s,
            Value::Vector(_) => panic!("expected a scalar value"),
        }
    }
    pub fn vector(self) -> Point {
        match self {
            Value::Vector(v) => v,
            Value::Scalar(_) => panic!("expected a vector value"),
        }
    }
}

/// Degree-of-freedom layout of one finite element family on a mesh. Boundary
/// entities of the conforming families are constrained to zero and excluded
/// from the numbering.
#[derive(Debug)]
pub struct Space {
    family: Family,
    mesh: Arc<Mesh>,
    entity_to_dof: Vec<Option<usize>>,
    dof_to_entity: Vec<usize>,
}

impl Space {
    pub fn new(mesh: Arc<Mesh>, family: Family) -> Result<Self> {
        let (n_entities, constrained): (usize, Box<dyn Fn(usize) -> bool>) = match family {
            Family::Rt0 => (mesh.num_facets(), Box::new(|f| mesh.is_boundary_facet(f))),
            Family::Ned0 => (mesh.num_edges(), Box::new(|e| mesh.is_boundary_edge(e))),
            Family::Dg0 => (mesh.num_cells(), Box::new(|_| false)),
            Family::Cg1 => {
                if mesh.dim() != 2 {
                    return Err(Error::SpaceMismatch("CG1 curl space is only used in 2D".into()));
                }
                (mesh.num_vertices(), Box::new(|v| mesh.is_boundary_vertex(v)))
            }
        };
        let mut entity_to_dof = vec![None; n_entities];
        let mut dof_to_entity = Vec::new();
        for (ent, slot) in entity_to_dof.iter_mut().enumerate() {
            if !constrained(ent) {
                *slot = Some(dof_to_entity.len());
                dof_to_entity.push(ent);
            }
        }
        drop(constrained);
        Ok(Self {
            family,
            mesh,
            entity_to_dof,
            dof_to_entity,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }
    pub fn ndofs(&self) -> usize {
        self.dof_to_entity.len()
    }
    pub fn dof_of_entity(&self, entity: usize) -> Option<usize> {
        self.entity_to_dof[entity]
    }
    pub fn entity_of_dof(&self, dof: usize) -> usize {
        self.dof_to_entity[dof]
    }

    pub fn local_dim(&self) -> usize {
        let d = self.mesh.dim();
        match self.family {
            Family::Rt0 | Family::Cg1 => d + 1,
            Family::Ned0 => local_edges(d).len(),
            Family::Dg0 => 1,
        }
    }

    /// Global dofs of the local basis functions of cell `k` (`None` where
    /// constrained).
    pub fn cell_dofs(&self, k: usize) -> Vec<Option<usize>> {
        match self.family {
            Family::Rt0 => self.mesh.cell_facets(k).iter().map(|&f| self.entity_to_dof[f]).collect(),
            Family::Ned0 => self.mesh.cell_edges(k).iter().map(|&e| self.entity_to_dof[e]).collect(),
            Family::Dg0 => vec![self.entity_to_dof[k]],
            Family::Cg1 => self.mesh.cell(k).iter().map(|&v| self.entity_to_dof[v]).collect(),
        }
    }

    /// Local basis values on cell `k` at barycentric point `lam`. Scalar
    /// families return `(1, 0, 0)` (DG0) or `(0, 0, λ)` (CG1).
    pub fn basis_values(&self, k: usize, lam: &[f64]) -> Vec<Point> {
        let m = &*self.mesh;
        let d = m.dim();
        match self.family {
            Family::Rt0 => {
                let x = m.point_from_barycentric(k, lam);
                let vol = m.cell_volume(k);
                (0..=d)
                    .map(|i| (x - m.vertex(m.cell(k)[i])) * (m.facet_sign(k, i) / (d as f64 * vol)))
                    .collect()
            }
            Family::Ned0 => {
                let g = m.cell_grads(k);
                local_edges(d).iter().map(|&[a, b]| g[b] * lam[a] - g[a] * lam[b]).collect()
            }
            Family::Dg0 => vec![Point::new(1.0, 0.0, 0.0)],
            Family::Cg1 => lam.iter().map(|&l| Point::new(0.0, 0.0, l)).collect(),
        }
    }

    /// Cellwise-constant curl (NED0, CG1) or divergence in the `x` slot (RT0)
    /// of the local basis functions of cell `k`.
    pub fn basis_derivatives(&self, k: usize) -> Vec<Point> {
        let m = &*self.mesh;
        let d = m.dim();
        let g = m.cell_grads(k);
        match self.family {
            Family::Rt0 => (0..=d)
                .map(|i| Point::new(m.facet_sign(k, i) / m.cell_volume(k), 0.0, 0.0))
                .collect(),
            Family::Ned0 => local_edges(d).iter().map(|&[a, b]| g[a].cross(&g[b]) * 2.0).collect(),
            Family::Dg0 => vec![Point::zeros()],
            Family::Cg1 => g.iter().map(|gi| Point::new(gi.y, -gi.x, 0.0)).collect(),
        }
    }
}

/// A coefficient vector tagged with its space.
#[derive(Clone, Debug)]
pub struct Field {
    space: Arc<Space>,
    coeffs: Vec<f64>,
}

impl Field {
    pub fn new(space: Arc<Space>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.ndofs() {
            return Err(Error::DimensionMismatch {
                context: "field coefficients",
                expected: space.ndofs(),
                got: coeffs.len(),
            });
        }
        Ok(Self { space, coeffs })
    }

    pub fn zeros(space: Arc<Space>) -> Self {
        let n = space.ndofs();
        Self {
            space,
            coeffs: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Point value on cell `cell`.
    pub fn eval(&self, cell: usize, x: &Point) -> Result<Value> {
        let lam = self.space.mesh().barycentric(cell, x);
        if lam.iter().any(|&l| l < -INSIDE_TOL) {
            return Err(Error::PointOutsideCell { cell });
        }
        Ok(eval_local(&self.space, &self.coeffs, cell, &lam))
    }
}

pub(crate) fn eval_local(space: &Space, coeffs: &[f64], cell: usize, lam: &[f64]) -> Value {
    let vals = space.basis_values(cell, lam);
    let v: Point = space
        .cell_dofs(cell)
        .iter()
        .zip(&vals)
        .filter_map(|(d, phi)| d.map(|d| phi * coeffs[d]))
        .sum();
    match space.family() {
        Family::Dg0 => Value::Scalar(v.x),
        Family::Cg1 => Value::Scalar(v.z),
        _ => Value::Vector(v),
    }
}

/// Basis values of one family at the volume quadrature points of every cell.
#[derive(Debug)]
pub struct Tabulation {
    pub nq: usize,
    pub nloc: usize,
    /// `[cell][q][local]`
    pub values: Vec<Point>,
    /// `[cell][local]`
    pub dofs: Vec<Option<usize>>,
    /// Curl (NED0, CG1) or divergence (RT0, `x` slot), `[cell][local]`.
    pub derivs: Vec<Point>,
}

impl Tabulation {
    fn new(space: &Space, rule: &SimplexRule) -> Self {
        let m = space.mesh();
        let nq = rule.len();
        let nloc = space.local_dim();
        let mut values = Vec::with_capacity(m.num_cells() * nq * nloc);
        let mut dofs = Vec::with_capacity(m.num_cells() * nloc);
        let mut derivs = Vec::with_capacity(m.num_cells() * nloc);
        for k in 0..m.num_cells() {
            for p in &rule.points {
                values.extend(space.basis_values(k, p));
            }
            dofs.extend(space.cell_dofs(k));
            derivs.extend(space.basis_derivatives(k));
        }
        Self {
            nq,
            nloc,
            values,
            dofs,
            derivs,
        }
    }

    #[inline]
    pub fn value(&self, k: usize, q: usize, i: usize) -> Point {
        self.values[(k * self.nq + q) * self.nloc + i]
    }
    #[inline]
    pub fn dof(&self, k: usize, i: usize) -> Option<usize> {
        self.dofs[k * self.nloc + i]
    }
    #[inline]
    pub fn deriv(&self, k: usize, i: usize) -> Point {
        self.derivs[k * self.nloc + i]
    }
}

/// The spaces of the scheme on one mesh together with every time-independent
/// operator: mass matrices (factorized), the curl and divergence matrices,
/// the Nédélec/Raviart–Thomas mixed mass and the divergence-free projector.
#[derive(Debug)]
pub struct Discretization {
    pub mesh: Arc<Mesh>,
    pub rt: Arc<Space>,
    pub ned: Arc<Space>,
    pub dg: Arc<Space>,
    /// Space of `w`, `J`, `E`: NED0 in 3D, CG1 in 2D.
    pub curl_space: Arc<Space>,
    pub rule: SimplexRule,
    /// Quadrature weight times cell volume, `[cell][q]`.
    pub qweights: Vec<f64>,
    /// Physical quadrature points, `[cell][q]`.
    pub qpoints: Vec<Point>,
    pub tab_rt: Tabulation,
    pub tab_ned: Tabulation,
    pub tab_curl: Tabulation,
    rt_local_mass: Vec<f64>,
    pub m_rt: SparseMatrix,
    pub m_ned: SparseMatrix,
    pub m_curl: SparseMatrix,
    /// `⟨φ_ned_i, φ_rt_j⟩`, rows NED0, columns RT0.
    pub m_mix: SparseMatrix,
    /// RT0 coefficients of the curl of curl-space basis functions.
    pub curl: SparseMatrix,
    /// `⟨div φ_j, 1_K⟩`, rows DG0, columns RT0.
    pub div: SparseMatrix,
    pub volumes: Vec<f64>,
    pub f_rt: FactorHandle,
    pub f_ned: FactorHandle,
    pub f_curl: FactorHandle,
    divfree: SaddleSystem,
}

impl Discretization {
    pub fn new(mesh: Arc<Mesh>) -> Result<Self> {
        let dim = mesh.dim();
        let rt = Arc::new(Space::new(mesh.clone(), Family::Rt0)?);
        let ned = Arc::new(Space::new(mesh.clone(), Family::Ned0)?);
        let dg = Arc::new(Space::new(mesh.clone(), Family::Dg0)?);
        let curl_space = if dim == 3 {
            ned.clone()
        } else {
            Arc::new(Space::new(mesh.clone(), Family::Cg1)?)
        };
        let rule = volume_rule(dim);
        let nc = mesh.num_cells();
        let mut qweights = Vec::with_capacity(nc * rule.len());
        let mut qpoints = Vec::with_capacity(nc * rule.len());
        for k in 0..nc {
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                qweights.push(w * mesh.cell_volume(k));
                qpoints.push(mesh.point_from_barycentric(k, p));
            }
        }
        let tab_rt = Tabulation::new(&rt, &rule);
        let tab_ned = Tabulation::new(&ned, &rule);
        let tab_curl = Tabulation::new(&curl_space, &rule);

        let nq = rule.len();
        let mass = |a: &Tabulation, b: &Tabulation, na: usize, nb: usize| {
            let mut t = Vec::new();
            for k in 0..nc {
                for i in 0..a.nloc {
                    let Some(di) = a.dof(k, i) else { continue };
                    for j in 0..b.nloc {
                        let Some(dj) = b.dof(k, j) else { continue };
                        let s: f64 = (0..nq).map(|q| qweights[k * nq + q] * a.value(k, q, i).dot(&b.value(k, q, j))).sum();
                        t.push((di, dj, s));
                    }
                }
            }
            assemble(na, nb, &t)
        };
        let m_rt = mass(&tab_rt, &tab_rt, rt.ndofs(), rt.ndofs())?;
        let m_ned = mass(&tab_ned, &tab_ned, ned.ndofs(), ned.ndofs())?;
        let m_curl = mass(&tab_curl, &tab_curl, curl_space.ndofs(), curl_space.ndofs())?;
        let m_mix = mass(&tab_ned, &tab_rt, ned.ndofs(), rt.ndofs())?;

        let nl = tab_rt.nloc;
        let mut rt_local_mass = Vec::with_capacity(nc * nl * nl);
        for k in 0..nc {
            for i in 0..nl {
                for j in 0..nl {
                    rt_local_mass.push(
                        (0..nq)
                            .map(|q| qweights[k * nq + q] * tab_rt.value(k, q, i).dot(&tab_rt.value(k, q, j)))
                            .sum(),
                    );
                }
            }
        }

        let curl = curl_matrix(&curl_space, &rt)?;
        let mut dt = Vec::new();
        for k in 0..nc {
            for i in 0..=dim {
                if let Some(d) = tab_rt.dof(k, i) {
                    dt.push((k, d, mesh.facet_sign(k, i)));
                }
            }
        }
        let div = assemble(nc, rt.ndofs(), &dt)?;
        let volumes: Vec<f64> = (0..nc).map(|k| mesh.cell_volume(k)).collect();

        let f_rt = factorize(&m_rt, "RT0 mass matrix")?;
        let f_ned = factorize(&m_ned, "NED0 mass matrix")?;
        let f_curl = factorize(&m_curl, "curl-space mass matrix")?;
        let divfree = SaddleSystem::new(&m_rt, &div, Some(&volumes), "divergence-free projection")?;

        Ok(Self {
            mesh,
            rt,
            ned,
            dg,
            curl_space,
            rule,
            qweights,
            qpoints,
            tab_rt,
            tab_ned,
            tab_curl,
            rt_local_mass,
            m_rt,
            m_ned,
            m_curl,
            m_mix,
            curl,
            div,
            volumes,
            f_rt,
            f_ned,
            f_curl,
            divfree,
        })
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }
    /// Unweighted local RT0 mass matrices, `[cell][i][j]`.
    pub fn rt_local_mass(&self) -> &[f64] {
        &self.rt_local_mass
    }
    pub fn num_cells(&self) -> usize {
        self.mesh.num_cells()
    }
    pub fn nq(&self) -> usize {
        self.rule.len()
    }

    pub fn tabulation(&self, family: Family) -> &Tabulation {
        match family {
            Family::Rt0 => &self.tab_rt,
            Family::Ned0 => &self.tab_ned,
            Family::Cg1 => &self.tab_curl,
            Family::Dg0 => panic!("DG0 values are cell constants"),
        }
    }

    pub fn space(&self, family: Family) -> &Arc<Space> {
        match family {
            Family::Rt0 => &self.rt,
            Family::Ned0 => &self.ned,
            Family::Dg0 => &self.dg,
            Family::Cg1 => &self.curl_space,
        }
    }

    fn mass_factor(&self, family: Family) -> &FactorHandle {
        match family {
            Family::Rt0 => &self.f_rt,
            Family::Ned0 => &self.f_ned,
            Family::Cg1 => &self.f_curl,
            Family::Dg0 => panic!("DG0 mass is diagonal"),
        }
    }

    /// Values of a field at every quadrature point, `[cell][q]`.
    pub fn eval_qp(&self, tab: &Tabulation, coeffs: &[f64]) -> Vec<Point> {
        let nq = self.nq();
        let mut out = Vec::with_capacity(self.num_cells() * nq);
        for k in 0..self.num_cells() {
            let local: Vec<f64> = (0..tab.nloc).map(|i| tab.dof(k, i).map_or(0.0, |d| coeffs[d])).collect();
            for q in 0..nq {
                out.push((0..tab.nloc).map(|i| tab.value(k, q, i) * local[i]).sum());
            }
        }
        out
    }

    /// `⟨g, φ_i⟩` for every dof `i` of the tabulated space, given `g` at the
    /// quadrature points.
    pub fn test_against(&self, tab: &Tabulation, ndofs: usize, g: &[Point]) -> Vec<f64> {
        let nq = self.nq();
        let mut out = vec![0.0; ndofs];
        for k in 0..self.num_cells() {
            for i in 0..tab.nloc {
                if let Some(d) = tab.dof(k, i) {
                    out[d] += (0..nq).map(|q| self.qweights[k * nq + q] * g[k * nq + q].dot(&tab.value(k, q, i))).sum::<f64>();
                }
            }
        }
        out
    }

    /// `⟨g, 1_K⟩` per cell for scalar `g` at the quadrature points.
    pub fn cell_integrals(&self, g: &[f64]) -> Vec<f64> {
        let nq = self.nq();
        (0..self.num_cells())
            .map(|k| (0..nq).map(|q| self.qweights[k * nq + q] * g[k * nq + q]).sum())
            .collect()
    }

    /// `Σ_K ρ_K ∫_K φ_i · φ_j`, the density-weighted RT0 mass matrix.
    pub fn weighted_rt_mass(&self, rho: &[f64]) -> SparseMatrix {
        let nl = self.tab_rt.nloc;
        let mut t = Vec::with_capacity(self.num_cells() * nl * nl);
        for k in 0..self.num_cells() {
            for i in 0..nl {
                let Some(di) = self.tab_rt.dof(k, i) else { continue };
                for j in 0..nl {
                    let Some(dj) = self.tab_rt.dof(k, j) else { continue };
                    t.push((di, dj, rho[k] * self.rt_local_mass[(k * nl + i) * nl + j]));
                }
            }
        }
        assemble(self.rt.ndofs(), self.rt.ndofs(), &t).expect("dofs in range")
    }

    /// `ρ`-weighted product `Σ_K ρ_K ∫_K u · v` without forming a matrix.
    pub fn weighted_rt_product(&self, rho: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let nl = self.tab_rt.nloc;
        let mut s = 0.0;
        for k in 0..self.num_cells() {
            let lu: Vec<f64> = (0..nl).map(|i| self.tab_rt.dof(k, i).map_or(0.0, |d| u[d])).collect();
            let lv: Vec<f64> = (0..nl).map(|i| self.tab_rt.dof(k, i).map_or(0.0, |d| v[d])).collect();
            let mut cell = 0.0;
            for i in 0..nl {
                for j in 0..nl {
                    cell += lu[i] * self.rt_local_mass[(k * nl + i) * nl + j] * lv[j];
                }
            }
            s += rho[k] * cell;
        }
        s
    }

    /// Per-cell `∫_K u · v` for RT0 coefficient vectors.
    pub fn rt_cell_products(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let nl = self.tab_rt.nloc;
        (0..self.num_cells())
            .map(|k| {
                let lu: Vec<f64> = (0..nl).map(|i| self.tab_rt.dof(k, i).map_or(0.0, |d| u[d])).collect();
                let lv: Vec<f64> = (0..nl).map(|i| self.tab_rt.dof(k, i).map_or(0.0, |d| v[d])).collect();
                let mut cell = 0.0;
                for i in 0..nl {
                    for j in 0..nl {
                        cell += lu[i] * self.rt_local_mass[(k * nl + i) * nl + j] * lv[j];
                    }
                }
                cell
            })
            .collect()
    }

    /// Cellwise divergence of an RT0 field.
    pub fn divergence(&self, u: &[f64]) -> Vec<f64> {
        self.div
            .mul_vec(u)
            .iter()
            .zip(&self.volumes)
            .map(|(flux, vol)| flux / vol)
            .collect()
    }

    /// Solves `M x = b` in the given vector family's mass matrix.
    pub fn mass_solve(&self, family: Family, b: &[f64]) -> Result<Vec<f64>> {
        match family {
            Family::Dg0 => Ok(b.iter().zip(&self.volumes).map(|(b, v)| b / v).collect()),
            _ => self.mass_factor(family).solve(b),
        }
    }

    /// L² projection of a vector-valued function onto RT0, NED0, or (via
    /// the out-of-plane component) CG1.
    pub fn project_vector(&self, family: Family, f: impl Fn(&Point) -> Point) -> Result<Vec<f64>> {
        let g: Vec<Point> = self.qpoints.iter().map(&f).collect();
        let tab = self.tabulation(family);
        let b = self.test_against(tab, self.space(family).ndofs(), &g);
        self.mass_solve(family, &b)
    }

    /// L² projection of a scalar function onto DG0 or CG1.
    pub fn project_scalar(&self, family: Family, f: impl Fn(&Point) -> f64) -> Result<Vec<f64>> {
        match family {
            Family::Dg0 => {
                let nq = self.nq();
                let wsum: f64 = self.rule.weights.iter().sum();
                Ok((0..self.num_cells())
                    .map(|k| {
                        let s: f64 = (0..nq).map(|q| self.rule.weights[q] * f(&self.qpoints[k * nq + q])).sum();
                        s / wsum
                    })
                    .collect())
            }
            Family::Cg1 => self.project_vector(family, |x| Point::new(0.0, 0.0, f(x))),
            _ => Err(Error::SpaceMismatch(format!("{family:?} is not a scalar family"))),
        }
    }

    /// Nearest element (in L²) of the divergence-free subspace of RT0 to `f`.
    pub fn project_divfree(&self, f: impl Fn(&Point) -> Point) -> Result<Vec<f64>> {
        let g: Vec<Point> = self.qpoints.iter().map(&f).collect();
        let b = self.test_against(&self.tab_rt, self.rt.ndofs(), &g);
        self.project_divfree_load(&b)
    }

    /// Divergence-free projection given the load vector `⟨f, φ_i⟩`.
    pub fn project_divfree_load(&self, load: &[f64]) -> Result<Vec<f64>> {
        let (u, _) = self.divfree.solve(load, &vec![0.0; self.num_cells()])?;
        Ok(u)
    }

    /// Canonical interpolant: facet fluxes (RT0), edge circulations (NED0) or
    /// vertex values of the `z` component (CG1).
    pub fn interpolate(&self, family: Family, f: impl Fn(&Point) -> Point) -> Result<Vec<f64>> {
        let mesh = &self.mesh;
        let space = self.space(family);
        let mut out = vec![0.0; space.ndofs()];
        match family {
            Family::Ned0 => {
                let (xs, ws) = gauss_legendre(5);
                for (d, slot) in out.iter_mut().enumerate() {
                    let [a, b] = mesh.edge(space.entity_of_dof(d));
                    let (xa, xb) = (mesh.vertex(a), mesh.vertex(b));
                    let t = xb - xa;
                    *slot = xs.iter().zip(&ws).map(|(&s, &w)| w * f(&(xa + t * s)).dot(&t)).sum();
                }
            }
            Family::Rt0 => {
                let rule = crate::quadrature::collapsed_rule(mesh.dim() - 1, 6);
                for (d, slot) in out.iter_mut().enumerate() {
                    let fid = space.entity_of_dof(d);
                    let fv = mesh.facet(fid);
                    let n = mesh.facet_normal(fid);
                    let meas = mesh.facet_measure(fid);
                    *slot = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| {
                            let x: Point = fv.iter().zip(p).map(|(&v, &l)| mesh.vertex(v) * l).sum();
                            w * meas * f(&x).dot(&n)
                        })
                        .sum();
                }
            }
            Family::Cg1 => {
                for (d, slot) in out.iter_mut().enumerate() {
                    *slot = f(&mesh.vertex(space.entity_of_dof(d))).z;
                }
            }
            Family::Dg0 => return Err(Error::SpaceMismatch("DG0 has no pointwise interpolant; use projection".into())),
        }
        Ok(out)
    }

    pub fn field(&self, family: Family, coeffs: Vec<f64>) -> Result<Field> {
        Field::new(self.space(family).clone(), coeffs)
    }
}

/// Matrix mapping curl-space coefficients to the RT0 coefficients of their
/// curl. Entries are the integers ±1 (facet/edge incidence) or 0.
pub fn curl_matrix(curl_space: &Space, rt: &Space) -> Result<SparseMatrix> {
    let mesh = rt.mesh();
    if !Arc::ptr_eq(mesh, curl_space.mesh()) {
        return Err(Error::SpaceMismatch("curl matrix spaces live on different meshes".into()));
    }
    match curl_space.family() {
        Family::Ned0 if mesh.dim() == 3 => {}
        Family::Cg1 if mesh.dim() == 2 => {}
        other => {
            return Err(Error::SpaceMismatch(format!(
                "{other:?} is not the curl space in {}D",
                mesh.dim()
            )))
        }
    }
    let dim = mesh.dim();
    let mut t = Vec::new();
    for rdof in 0..rt.ndofs() {
        let f = rt.entity_of_dof(rdof);
        let (k, _) = mesh.facet_cells(f);
        let fv = mesh.facet(f);
        let n = mesh.facet_normal(f);
        let meas = mesh.facet_measure(f);
        let curls = curl_space.basis_derivatives(k);
        let cv = mesh.cell(k);
        let dofs = curl_space.cell_dofs(k);
        for (i, dof) in dofs.iter().enumerate() {
            let Some(cd) = dof else { continue };
            let on_facet = if dim == 3 {
                let [a, b] = local_edges(3)[i];
                fv.contains(&cv[a]) && fv.contains(&cv[b])
            } else {
                fv.contains(&cv[i])
            };
            if !on_facet {
                continue;
            }
            let flux = curls[i].dot(&n) * meas;
            let r = flux.round();
            debug_assert!((flux - r).abs() < 1e-8, "non-integer curl incidence {flux}");
            if r != 0.0 {
                t.push((rdof, *cd, r));
            }
        }
    }
    assemble(rt.ndofs(), curl_space.ndofs(), &t)
}
