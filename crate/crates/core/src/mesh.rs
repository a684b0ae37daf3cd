//! Structured simplicial meshes of axis-aligned boxes.
//!
//! Every cell stores its vertices in ascending global order, so local entity
//! orientation always agrees with the global one: edges run from the lower to
//! the higher vertex index, and local facet `i` is the facet opposite local
//! vertex `i`. Points are stored as 3-vectors; in 2D the `z` component is zero.

use std::collections::HashMap;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Point = Vector3<f64>;

/// Local vertex pairs of the edges of a triangle.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
/// Local vertex pairs of the edges of a tetrahedron.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

pub fn local_edges(dim: usize) -> &'static [[usize; 2]] {
    if dim == 2 {
        &TRI_EDGES
    } else {
        &TET_EDGES
    }
}

/// Box `[lower, upper]` split into `subdivisions[i]` intervals along axis `i`.
/// Only the first `dim` components are used.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxSpec {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub subdivisions: [usize; 3],
}

impl BoxSpec {
    pub fn new(lower: [f64; 3], upper: [f64; 3], subdivisions: [usize; 3]) -> Self {
        Self {
            lower,
            upper,
            subdivisions,
        }
    }

    /// `[lo, hi]^dim` with `n` subdivisions per axis.
    pub fn cube(lo: f64, hi: f64, n: usize) -> Self {
        Self::new([lo; 3], [hi; 3], [n; 3])
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidSpec(format!("dimension must be 2 or 3, got {dim}")));
        }
        for axis in 0..dim {
            if self.subdivisions[axis] == 0 {
                return Err(Error::InvalidSpec(format!("zero subdivisions along axis {axis}")));
            }
            if !(self.upper[axis] > self.lower[axis]) {
                return Err(Error::InvalidSpec(format!(
                    "upper corner must exceed lower corner along axis {axis}"
                )));
            }
        }
        Ok(())
    }

    pub fn volume(&self, dim: usize) -> f64 {
        (0..dim).map(|a| self.upper[a] - self.lower[a]).product()
    }
}

#[derive(Clone, Debug)]
pub struct InteriorFacet {
    pub facet: usize,
    pub cells: (usize, usize),
    /// Unit normal pointing from `cells.0` into `cells.1`.
    pub normal: Point,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    dim: usize,
    vertices: Vec<Point>,
    cells: Vec<usize>,
    facets: Vec<usize>,
    edges: Vec<[usize; 2]>,
    cell_facets: Vec<usize>,
    cell_edges: Vec<usize>,
    facet_cells: Vec<(usize, Option<usize>)>,
    facet_normal: Vec<Point>,
    facet_measure: Vec<f64>,
    cell_volume: Vec<f64>,
    cell_grads: Vec<Point>,
    facet_boundary: Vec<bool>,
    edge_boundary: Vec<bool>,
    vertex_boundary: Vec<bool>,
}

/// Builds a conforming triangulation of the box: each grid square is cut into
/// two triangles along its `(0,0)-(1,1)` diagonal, each grid cube into the six
/// Kuhn tetrahedra sharing its main diagonal.
pub fn build_box_mesh(spec: &BoxSpec, dim: usize) -> Result<Mesh> {
    spec.validate(dim)?;
    let n = spec.subdivisions;
    let coord = |axis: usize, i: usize| {
        spec.lower[axis] + (spec.upper[axis] - spec.lower[axis]) * i as f64 / n[axis] as f64
    };

    let mut vertices = Vec::new();
    let mut cells = Vec::new();
    if dim == 2 {
        let vid = |i: usize, j: usize| j * (n[0] + 1) + i;
        for j in 0..=n[1] {
            for i in 0..=n[0] {
                vertices.push(Point::new(coord(0, i), coord(1, j), 0.0));
            }
        }
        for j in 0..n[1] {
            for i in 0..n[0] {
                let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
                cells.push(vec![v00, v10, v11]);
                cells.push(vec![v00, v11, v01]);
            }
        }
    } else {
        let vid = |i: usize, j: usize, k: usize| (k * (n[1] + 1) + j) * (n[0] + 1) + i;
        for k in 0..=n[2] {
            for j in 0..=n[1] {
                for i in 0..=n[0] {
                    vertices.push(Point::new(coord(0, i), coord(1, j), coord(2, k)));
                }
            }
        }
        const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    for perm in PERMS {
                        let mut c = [i, j, k];
                        let mut tet = vec![vid(c[0], c[1], c[2])];
                        for axis in perm {
                            c[axis] += 1;
                            tet.push(vid(c[0], c[1], c[2]));
                        }
                        cells.push(tet);
                    }
                }
            }
        }
    }
    Ok(Mesh::from_cells(dim, vertices, cells))
}

impl Mesh {
    /// Builds connectivity and geometry from raw cells. Cell vertex lists are
    /// sorted internally.
    pub fn from_cells(dim: usize, vertices: Vec<Point>, raw_cells: Vec<Vec<usize>>) -> Self {
        let nv = dim + 1;
        let ncells = raw_cells.len();
        let mut cells = Vec::with_capacity(ncells * nv);
        for mut c in raw_cells {
            assert_eq!(c.len(), nv, "cell must have dim + 1 vertices");
            c.sort_unstable();
            cells.extend_from_slice(&c);
        }

        let mut facet_index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut facets = Vec::new();
        let mut facet_cells: Vec<(usize, Option<usize>)> = Vec::new();
        let mut cell_facets = Vec::with_capacity(ncells * nv);
        for k in 0..ncells {
            let cv = &cells[k * nv..(k + 1) * nv];
            for skip in 0..nv {
                let key: Vec<usize> = (0..nv).filter(|&i| i != skip).map(|i| cv[i]).collect();
                let id = match facet_index.get(&key) {
                    Some(&id) => {
                        facet_cells[id].1 = Some(k);
                        id
                    }
                    None => {
                        let id = facet_cells.len();
                        facets.extend_from_slice(&key);
                        facet_index.insert(key, id);
                        facet_cells.push((k, None));
                        id
                    }
                };
                cell_facets.push(id);
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut cell_edges = Vec::new();
        for k in 0..ncells {
            let cv = &cells[k * nv..(k + 1) * nv];
            for &[a, b] in local_edges(dim) {
                let key = [cv[a], cv[b]];
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edges.len() - 1
                });
                cell_edges.push(id);
            }
        }

        let nfacets = facet_cells.len();
        let mut facet_boundary = vec![false; nfacets];
        let mut edge_boundary = vec![false; edges.len()];
        let mut vertex_boundary = vec![false; vertices.len()];
        for f in 0..nfacets {
            if facet_cells[f].1.is_none() {
                facet_boundary[f] = true;
                let fv = &facets[f * dim..(f + 1) * dim];
                for &v in fv {
                    vertex_boundary[v] = true;
                }
                for a in 0..dim {
                    for b in a + 1..dim {
                        edge_boundary[edge_index[&[fv[a], fv[b]]]] = true;
                    }
                }
            }
        }

        let mut cell_volume = Vec::with_capacity(ncells);
        let mut cell_grads = Vec::with_capacity(ncells * nv);
        for k in 0..ncells {
            let cv = &cells[k * nv..(k + 1) * nv];
            let (vol, grads) = simplex_geometry(dim, cv.iter().map(|&v| vertices[v]));
            cell_volume.push(vol);
            cell_grads.extend(grads);
        }

        let mut facet_normal = Vec::with_capacity(nfacets);
        let mut facet_measure = Vec::with_capacity(nfacets);
        for f in 0..nfacets {
            let fv = &facets[f * dim..(f + 1) * dim];
            let x0 = vertices[fv[0]];
            let (mut normal, measure) = if dim == 2 {
                let t = vertices[fv[1]] - x0;
                (Point::new(t.y, -t.x, 0.0), t.norm())
            } else {
                let c = (vertices[fv[1]] - x0).cross(&(vertices[fv[2]] - x0));
                (c, 0.5 * c.norm())
            };
            normal /= normal.norm();
            let k = facet_cells[f].0;
            let cv = &cells[k * nv..(k + 1) * nv];
            let opposite = cv.iter().find(|v| !fv.contains(v)).copied().unwrap();
            if (vertices[opposite] - x0).dot(&normal) > 0.0 {
                normal = -normal;
            }
            facet_normal.push(normal);
            facet_measure.push(measure);
        }

        Self {
            dim,
            vertices,
            cells,
            facets,
            edges,
            cell_facets,
            cell_edges,
            facet_cells,
            facet_normal,
            facet_measure,
            cell_volume,
            cell_grads,
            facet_boundary,
            edge_boundary,
            vertex_boundary,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_cells(&self) -> usize {
        self.cell_volume.len()
    }
    pub fn num_facets(&self) -> usize {
        self.facet_cells.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }
    /// Vertex indices of cell `k`, ascending.
    pub fn cell(&self, k: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cells[k * nv..(k + 1) * nv]
    }
    pub fn facet(&self, f: usize) -> &[usize] {
        &self.facets[f * self.dim..(f + 1) * self.dim]
    }
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    /// Facet ids of cell `k`; entry `i` is opposite local vertex `i`.
    pub fn cell_facets(&self, k: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cell_facets[k * nv..(k + 1) * nv]
    }
    /// Edge ids of cell `k` in [`local_edges`] order.
    pub fn cell_edges(&self, k: usize) -> &[usize] {
        let ne = local_edges(self.dim).len();
        &self.cell_edges[k * ne..(k + 1) * ne]
    }
    pub fn facet_cells(&self, f: usize) -> (usize, Option<usize>) {
        self.facet_cells[f]
    }
    /// Unit normal of facet `f`, pointing out of its first cell.
    pub fn facet_normal(&self, f: usize) -> Point {
        self.facet_normal[f]
    }
    pub fn facet_measure(&self, f: usize) -> f64 {
        self.facet_measure[f]
    }
    pub fn cell_volume(&self, k: usize) -> f64 {
        self.cell_volume[k]
    }
    /// Gradients of the barycentric coordinates of cell `k`.
    pub fn cell_grads(&self, k: usize) -> &[Point] {
        let nv = self.dim + 1;
        &self.cell_grads[k * nv..(k + 1) * nv]
    }
    pub fn is_boundary_facet(&self, f: usize) -> bool {
        self.facet_boundary[f]
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_boundary[e]
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_boundary[v]
    }

    /// +1 if the stored normal of the local facet `i` of cell `k` points out of `k`.
    pub fn facet_sign(&self, k: usize, i: usize) -> f64 {
        let f = self.cell_facets(k)[i];
        if self.facet_cells[f].0 == k {
            1.0
        } else {
            -1.0
        }
    }

    pub fn cell_centroid(&self, k: usize) -> Point {
        let cv = self.cell(k);
        cv.iter().map(|&v| self.vertices[v]).sum::<Point>() / cv.len() as f64
    }

    pub fn cell_diameter(&self, k: usize) -> f64 {
        let cv = self.cell(k);
        local_edges(self.dim)
            .iter()
            .map(|&[a, b]| (self.vertices[cv[a]] - self.vertices[cv[b]]).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.num_cells()).map(|k| self.cell_diameter(k)).fold(0.0, f64::max)
    }

    /// Barycentric coordinates of `x` with respect to cell `k`.
    pub fn barycentric(&self, k: usize, x: &Point) -> Vec<f64> {
        let x0 = self.vertices[self.cell(k)[0]];
        let grads = self.cell_grads(k);
        let mut lam: Vec<f64> = grads.iter().map(|g| g.dot(&(x - x0))).collect();
        lam[0] += 1.0;
        lam
    }

    /// Maps barycentric coordinates on cell `k` to a physical point.
    pub fn point_from_barycentric(&self, k: usize, lam: &[f64]) -> Point {
        self.cell(k)
            .iter()
            .zip(lam)
            .map(|(&v, &l)| self.vertices[v] * l)
            .sum()
    }

    pub fn interior_facets(&self) -> Vec<InteriorFacet> {
        interior_facets(self)
    }
}

pub fn interior_facets(mesh: &Mesh) -> Vec<InteriorFacet> {
    (0..mesh.num_facets())
        .filter_map(|f| match mesh.facet_cells(f) {
            (a, Some(b)) => Some(InteriorFacet {
                facet: f,
                cells: (a, b),
                normal: mesh.facet_normal(f),
            }),
            _ => None,
        })
        .collect()
}

fn simplex_geometry(dim: usize, verts: impl Iterator<Item = Point>) -> (f64, Vec<Point>) {
    let xs: Vec<Point> = verts.collect();
    let mut grads = vec![Point::zeros(); dim + 1];
    let vol;
    if dim == 2 {
        let jac = Matrix2::from_columns(&[(xs[1] - xs[0]).xy(), (xs[2] - xs[0]).xy()]);
        vol = jac.determinant().abs() / 2.0;
        let inv_t = jac.try_inverse().expect("degenerate triangle").transpose();
        for i in 0..2 {
            let g = inv_t.column(i);
            grads[i + 1] = Point::new(g[0], g[1], 0.0);
        }
    } else {
        let jac = Matrix3::from_columns(&[xs[1] - xs[0], xs[2] - xs[0], xs[3] - xs[0]]);
        vol = jac.determinant().abs() / 6.0;
        let inv_t = jac.try_inverse().expect("degenerate tetrahedron").transpose();
        for i in 0..3 {
            grads[i + 1] = inv_t.column(i).into_owned();
        }
    }
    grads[0] = -grads[1..].iter().sum::<Point>();
    (vol, grads)
}
