#![allow(dead_code)]

use std::sync::Arc;

use mhdfem::forms::{FormCache, MomentumInputs, Scheme, UpwindParams};
use mhdfem::stepper::State;
use mhdfem::{build_box_mesh, BoxSpec, Discretization, Family, Mesh, Point};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-11;

pub fn two_triangles() -> Arc<Discretization> {
    let verts = vec![
        Point::new(0.0, 0.0, 0.0),
        Point::new(1.0, 0.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
        Point::new(0.0, 1.0, 0.0),
    ];
    let m = Mesh::from_cells(2, verts, vec![vec![0, 1, 2], vec![0, 2, 3]]);
    Arc::new(Discretization::new(Arc::new(m)).unwrap())
}

pub fn boxed(dim: usize, n: usize) -> Arc<Discretization> {
    let m = build_box_mesh(&BoxSpec::cube(-1.0, 1.0, n), dim).unwrap();
    Arc::new(Discretization::new(Arc::new(m)).unwrap())
}

/// The 2-triangle square, the 48-tet cube and a 4×4 square (whose curl
/// space is not empty).
pub fn property_meshes() -> Vec<(&'static str, Arc<Discretization>)> {
    vec![("2-triangle", two_triangles()), ("48-tet", boxed(3, 2)), ("4x4", boxed(2, 4))]
}

pub fn random(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn positive(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}

fn qp(d: &Discretization, fam: Family, c: &[f64]) -> Vec<Point> {
    d.eval_qp(d.tabulation(fam), c)
}

/// `∫ ρ a·b` by quadrature, with `ρ` per cell.
fn integrate(d: &Discretization, rho: Option<&[f64]>, a: &[Point], b: &[Point]) -> f64 {
    let nq = d.nq();
    (0..a.len())
        .map(|i| d.qweights[i] * rho.map_or(1.0, |r| r[i / nq]) * a[i].dot(&b[i]))
        .sum()
}

fn l2(d: &Discretization, fam: Family, c: &[f64]) -> f64 {
    let v = qp(d, fam, c);
    integrate(d, None, &v, &v).sqrt()
}

/// `∇×π(x × y)` at the quadrature points, `π` onto the curl space.
fn curl_of_projected_cross(d: &Discretization, x: &[Point], y: &[Point]) -> Vec<Point> {
    let g: Vec<Point> = x.iter().zip(y).map(|(a, b)| a.cross(b)).collect();
    let z = d
        .mass_solve(Family::Cg1, &d.test_against(&d.tab_curl, d.curl_space.ndofs(), &g))
        .unwrap();
    qp(d, Family::Rt0, &d.curl.mul_vec(&z))
}

/// `a_h(ρw, u, v) = ⟨ρw, ∇×π(u×v)⟩`.
pub fn ah_simple(d: &Discretization, rho: Option<&[f64]>, w: &[Point], u: &[f64], v: &[f64]) -> f64 {
    let c = curl_of_projected_cross(d, &qp(d, Family::Rt0, u), &qp(d, Family::Rt0, v));
    integrate(d, rho, w, &c)
}

/// `a_h(ρw, u, v) = ⟨ρw, ∇×π(πu × πv)⟩` with `πu`, `πv` in NED0.
pub fn ah_composed(d: &Discretization, rho: Option<&[f64]>, w: &[Point], u: &[f64], v: &[f64]) -> f64 {
    let proj = |x: &[f64]| {
        let c = d.mass_solve(Family::Ned0, &d.m_mix.mul_vec(x)).unwrap();
        qp(d, Family::Ned0, &c)
    };
    let c = curl_of_projected_cross(d, &proj(u), &proj(v));
    integrate(d, rho, w, &c)
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rel(err: f64, scale: f64) -> f64 {
    err.abs() / scale.max(1.0)
}

/// Antisymmetry `a_h(w,u,v) = −a_h(w,v,u)` of both realizations, and
/// `a_h(w,u,u) = 0`.
pub fn check_ahalt(d: &Discretization, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nr = d.rt.ndofs();
    let (w, u, v) = (random(&mut rng, nr), random(&mut rng, nr), random(&mut rng, nr));
    let rho = positive(&mut rng, d.num_cells());
    let wq = qp(d, Family::Rt0, &w);
    let scale = l2(d, Family::Rt0, &w) * l2(d, Family::Rt0, &u) * l2(d, Family::Rt0, &v);
    let mut worst = 0.0f64;
    for ah in [ah_simple, ah_composed] {
        let s = ah(d, Some(&rho), &wq, &u, &v) + ah(d, Some(&rho), &wq, &v, &u);
        worst = worst.max(rel(s, 2.0 * scale)).max(rel(ah(d, Some(&rho), &wq, &u, &u), 2.0 * scale));
    }
    worst
}

/// `b_h(f,g,u) + b_h(g,f,u) = 0` for exactly divergence-free `u`.
pub fn check_bhplusminus(d: &Arc<Discretization>, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fc = FormCache::new(d.clone(), None).unwrap();
    let u = d.curl.mul_vec(&random(&mut rng, d.curl_space.ndofs()));
    let f = random(&mut rng, d.num_cells());
    let g = random(&mut rng, d.num_cells());
    let s = fc.bh(&f, &g, &u).unwrap() + fc.bh(&g, &f, &u).unwrap();
    let scale: f64 = u.iter().map(|x| x.abs()).sum();
    rel(s, scale)
}

/// `a_h(w,u,v) = 0` for the composed realization when `∇×w = u`.
pub fn check_ahvanishes(d: &Discretization, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random(&mut rng, d.curl_space.ndofs());
    let u = d.curl.mul_vec(&a);
    let v = random(&mut rng, d.rt.ndofs());
    let aq = qp(d, Family::Cg1, &a);
    let val = ah_composed(d, None, &aq, &u, &v);
    let scale = integrate(d, None, &aq, &aq).sqrt() * l2(d, Family::Rt0, &u) * l2(d, Family::Rt0, &v);
    rel(val, scale)
}

/// The auxiliary-field identities behind the implementable forms of both
/// schemes, each against direct quadrature of the defining trilinear form.
pub fn check_rectify(d: &Arc<Discretization>, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fc = FormCache::new(d.clone(), None).unwrap();
    let nr = d.rt.ndofs();
    let (u, v, b, c) = (
        random(&mut rng, nr),
        random(&mut rng, nr),
        random(&mut rng, nr),
        random(&mut rng, nr),
    );
    let rho = positive(&mut rng, d.num_cells());
    let (uq, bq, cq) = (qp(d, Family::Rt0, &u), qp(d, Family::Rt0, &b), qp(d, Family::Rt0, &c));
    let nrm = |x: &[f64]| l2(d, Family::Rt0, x);
    let s3 = |x: &[f64], y: &[f64], z: &[f64]| 2.0 * nrm(x) * nrm(y) * nrm(z);
    let zc = vec![0.0; d.curl_space.ndofs()];
    let w = fc.aux_w(&rho, &u).unwrap();
    let j = fc.aux_j(&b).unwrap();
    let mut worst = 0.0f64;

    // scheme A
    let wxu = dotv(&fc.lorentz_load(&w, &zc, Family::Rt0, &u, &u, Family::Rt0), &v);
    worst = worst.max(rel(wxu - ah_simple(d, Some(&rho), &uq, &u, &v), s3(&u, &u, &v)));
    let jxb = -dotv(&fc.lorentz_load(&zc, &j, Family::Rt0, &b, &b, Family::Rt0), &v);
    worst = worst.max(rel(jxb - ah_simple(d, None, &bq, &b, &v), s3(&b, &b, &v)));
    let e = fc.aux_e(Family::Rt0, &u, &b).unwrap();
    let ce = d.m_rt.bilinear(&d.curl.mul_vec(&e), &c);
    worst = worst.max(rel(ce - ah_simple(d, None, &cq, &b, &u), s3(&c, &b, &u)));

    // θ = ½π(u·u)
    let theta = fc.aux_theta(&u, &v);
    let nq = d.nq();
    let vq = qp(d, Family::Rt0, &v);
    for k in 0..d.num_cells() {
        let avg: f64 = (0..nq).map(|q| d.qweights[k * nq + q] * uq[k * nq + q].dot(&vq[k * nq + q])).sum::<f64>()
            / d.volumes[k];
        worst = worst.max(rel(theta[k] - 0.5 * avg, 1.0));
    }

    // scheme B
    let uu = fc.aux_u(&u).unwrap();
    let h = fc.aux_h(&b).unwrap();
    let alpha = fc.aux_alpha(&w, &uu, &j, &h).unwrap();
    let lor = dotv(&d.m_mix.tr_mul_vec(&alpha), &v);
    let expect = ah_composed(d, Some(&rho), &uq, &u, &v) - ah_composed(d, None, &bq, &b, &v);
    worst = worst.max(rel(lor - expect, s3(&u, &u, &v) + s3(&b, &b, &v)));
    let e = fc.aux_e(Family::Ned0, &uu, &h).unwrap();
    let ce = d.m_rt.bilinear(&d.curl.mul_vec(&e), &c);
    worst = worst.max(rel(ce - ah_composed(d, None, &cq, &b, &u), s3(&c, &b, &u)));
    worst
}

/// `½Δt⁻¹∫(ρ₁u₁·u₁ − ρ₀u₀·u₀) = ⟨D(ρu), u_mid⟩ − ½⟨Dρ, u₀·u₁⟩`.
pub fn check_telescoping(d: &Discretization, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nr = d.rt.ndofs();
    let (u0, u1) = (random(&mut rng, nr), random(&mut rng, nr));
    let (r0, r1) = (positive(&mut rng, d.num_cells()), positive(&mut rng, d.num_cells()));
    let dt: f64 = rng.random_range(0.001..0.1);
    let (q0, q1) = (qp(d, Family::Rt0, &u0), qp(d, Family::Rt0, &u1));
    let lhs = 0.5 / dt * (integrate(d, Some(&r1), &q1, &q1) - integrate(d, Some(&r0), &q0, &q0));
    let nq = d.nq();
    let rhs: f64 = (0..q0.len())
        .map(|i| {
            let k = i / nq;
            let mom = (q1[i] * r1[k] - q0[i] * r0[k]) / dt;
            let mid = (q0[i] + q1[i]) * 0.5;
            d.qweights[i] * (mom.dot(&mid) - 0.5 * (r1[k] - r0[k]) / dt * q0[i].dot(&q1[i]))
        })
        .sum();
    rel(lhs - rhs, lhs.abs())
}

/// One step of the fully coupled scheme solved monolithically by Newton's
/// method with a finite-difference Jacobian on dense matrices.
///
/// Unknowns `(u₁, B₁, ρ₁, p)`; equations: momentum, induction, density,
/// `div u₁ = 0` and `∫p = 0`. The auxiliary fields are eliminated through
/// their defining linear solves.
pub fn newton_step(
    d: &Arc<Discretization>,
    scheme: Scheme,
    upwind: Option<UpwindParams>,
    dt: f64,
    s: &State,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let fc = FormCache::new(d.clone(), upwind).unwrap();
    let (nr, nc) = (d.rt.ndofs(), d.num_cells());
    let n = 2 * nr + 2 * nc;
    let split = |x: &DVector<f64>| {
        let x = x.as_slice();
        (
            x[..nr].to_vec(),
            x[nr..2 * nr].to_vec(),
            x[2 * nr..2 * nr + nc].to_vec(),
            x[2 * nr + nc..].to_vec(),
        )
    };
    let residual = |x: &DVector<f64>| -> DVector<f64> {
        let (u1, b1, r1, p) = split(x);
        let mid = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect() };
        let (um, rm) = (mid(&s.u, &u1), mid(&s.rho, &r1));
        let aux = fc.compute_aux(scheme, &s.rho, &s.u, &s.b, &r1, &u1, &b1).unwrap();
        let gam = fc.gammas(&um);
        let mom = fc.momentum_residual(&MomentumInputs {
            dt,
            rho_k: &s.rho,
            u_k: &s.u,
            rho_k1: &r1,
            u_k1: &u1,
            p: &p,
            aux: &aux,
            rho_mid: Some(&rm),
            gammas: Some(&gam),
            forcing: None,
        });
        let ce = d.curl.mul_vec(&aux.e);
        let ind = (0..nr).map(|i| (b1[i] - s.b[i]) / dt + ce[i]);
        let den = (0..nc).map(|k| {
            let mut chi = vec![0.0; nc];
            chi[k] = 1.0;
            d.volumes[k] * (r1[k] - s.rho[k]) / dt + fc.bh_upwind(&um, &chi, &rm, &um).unwrap()
        });
        let div = d.div.mul_vec(&u1);
        let mean: f64 = p.iter().zip(&d.volumes).map(|(a, v)| a * v).sum();
        DVector::from_iterator(
            n + 1,
            mom.into_iter().chain(ind).chain(den).chain(div).chain([mean]),
        )
    };
    let mut x = DVector::from_iterator(n, s.u.iter().chain(&s.b).chain(&s.rho).chain(&s.p).copied());
    for _ in 0..30 {
        let r = residual(&x);
        if r.amax() < 1e-14 {
            break;
        }
        let mut jac = DMatrix::zeros(n + 1, n);
        for c in 0..n {
            let h = 1e-6 * (1.0 + x[c].abs());
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[c] += h;
            xm[c] -= h;
            jac.set_column(c, &((residual(&xp) - residual(&xm)) / (2.0 * h)));
        }
        let dx = jac.svd(true, true).solve(&r, 1e-13).unwrap();
        x -= dx;
    }
    assert!(residual(&x).amax() < 1e-11, "Newton did not converge: {}", residual(&x).amax());
    split(&x)
}
