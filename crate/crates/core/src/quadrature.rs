//! Quadrature on simplices, expressed in barycentric coordinates with weights
//! normalized to sum to one (multiply by the cell measure).

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct SimplexRule {
    /// Barycentric coordinates, `dim + 1` per point.
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Collapsed-coordinate Gauss product rule exact for polynomials of total
/// degree `degree` on the reference simplex.
pub fn collapsed_rule(dim: usize, degree: usize) -> SimplexRule {
    let pts_for = |deg: usize| deg / 2 + 1;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 2 {
        let (xu, wu) = gauss_legendre(pts_for(degree + 1));
        let (xv, wv) = gauss_legendre(pts_for(degree));
        for (&u, &a) in xu.iter().zip(&wu) {
            for (&v, &b) in xv.iter().zip(&wv) {
                let (x, y) = (u, v * (1.0 - u));
                points.push(vec![1.0 - x - y, x, y]);
                weights.push(2.0 * a * b * (1.0 - u));
            }
        }
    } else {
        let (xu, wu) = gauss_legendre(pts_for(degree + 2));
        let (xv, wv) = gauss_legendre(pts_for(degree + 1));
        let (xw, ww) = gauss_legendre(pts_for(degree));
        for (&u, &a) in xu.iter().zip(&wu) {
            for (&v, &b) in xv.iter().zip(&wv) {
                for (&w, &c) in xw.iter().zip(&ww) {
                    let x = u;
                    let y = v * (1.0 - u);
                    let z = w * (1.0 - u) * (1.0 - v);
                    points.push(vec![1.0 - x - y - z, x, y, z]);
                    weights.push(6.0 * a * b * c * (1.0 - u).powi(2) * (1.0 - v));
                }
            }
        }
    }
    SimplexRule { points, weights }
}

/// Symmetric rule exact to degree 4 (triangles, 6 points) or degree 5
/// (tetrahedra, 14 points); all weights positive.
pub fn compact_rule(dim: usize) -> SimplexRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 2 {
        for (a, w) in [(0.445948490915965, 0.223381589678011), (0.091576213509771, 0.109951743655322)] {
            let b = 1.0 - 2.0 * a;
            for p in [[b, a, a], [a, b, a], [a, a, b]] {
                points.push(p.to_vec());
                weights.push(w);
            }
        }
    } else {
        for (a, w) in [
            (0.0927352503108912, 0.01224884051939366),
            (0.3108859192633006, 0.01878132095300264),
        ] {
            let b = 1.0 - 3.0 * a;
            for i in 0..4 {
                let mut p = vec![a; 4];
                p[i] = b;
                points.push(p);
                weights.push(6.0 * w);
            }
        }
        let c = 0.4544962958743506;
        let d = 0.5 - c;
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            let mut p = vec![d; 4];
            p[i] = c;
            p[j] = c;
            points.push(p);
            weights.push(6.0 * 0.007091003462846911);
        }
    }
    SimplexRule { points, weights }
}

/// Default volume rule used by assembly.
pub fn volume_rule(dim: usize) -> SimplexRule {
    compact_rule(dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // ∫_ref x^a y^b z^c = a! b! c! / (a + b + c + dim)!, normalized by 1/dim!
    fn exact_moment(exps: &[u32]) -> f64 {
        let dim = exps.len() as u32;
        let num: f64 = exps.iter().map(|&e| factorial(e)).product();
        num / factorial(exps.iter().sum::<u32>() + dim) * factorial(dim)
    }

    fn check_rule(rule: &SimplexRule, dim: usize, degree: u32) {
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 1.0).abs() < 1e-13);
        for a in 0..=degree {
            for b in 0..=degree - a {
                let zmax = if dim == 3 { degree - a - b } else { 0 };
                for c in 0..=zmax {
                    let exps: Vec<u32> = if dim == 2 { vec![a, b] } else { vec![a, b, c] };
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * exps.iter().enumerate().map(|(i, &e)| p[i + 1].powi(e as i32)).product::<f64>())
                        .sum();
                    let ex = exact_moment(&exps);
                    assert!((q - ex).abs() < 1e-13, "dim {dim} exps {exps:?}: {q} vs {ex}");
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for p in 0..(2 * n) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
                assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn compact_rules_have_stated_degree() {
        check_rule(&compact_rule(2), 2, 4);
        check_rule(&compact_rule(3), 3, 5);
    }

    #[test]
    fn collapsed_rules_have_requested_degree() {
        for deg in [1, 4, 8] {
            check_rule(&collapsed_rule(2, deg), 2, deg as u32);
            check_rule(&collapsed_rule(3, deg), 3, deg as u32);
        }
    }
}
