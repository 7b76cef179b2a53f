//! Eigenstructure and Cartan decomposition of 3x3 unimodular matrices.
//!
//! Eigenvalues come from the characteristic cubic (trigonometric form),
//! eigenvectors from null vectors of `g - lambda`. Each eigenvalue is then
//! refined by a two-sided Rayleigh quotient; the smallest one is refined on
//! the inverse, where it is dominant. The Cartan decomposition is a
//! one-sided Jacobi SVD.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{FlagError, Result};
use crate::projective::{join, Flag, GroupElement, ProjLine, ProjPoint};
use crate::tolerance;

/// Real eigendecomposition with `|values[0]| >= |values[1]| >= |values[2]|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTriple {
    pub values: [f64; 3],
    pub vectors: [ProjPoint; 3],
    /// Some ratio `|lambda_i| / |lambda_j|` (i < j) is below `1 + gap`.
    pub near_degenerate: bool,
}

/// `g = k diag(lambda, mu, nu) l^T`, `k, l` in SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanTriple {
    pub k: Matrix3<f64>,
    pub l: Matrix3<f64>,
    pub values: [f64; 3],
}

impl CartanTriple {
    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.k * Matrix3::from_diagonal(&Vector3::from(self.values)) * self.l.transpose()
    }
}

/// Coefficients `(T, M, D)` of `x^3 - T x^2 + M x - D`.
pub fn char_poly(m: &Matrix3<f64>) -> (f64, f64, f64) {
    let t = m.trace();
    let minor = |i: usize, j: usize| m[(i, i)] * m[(j, j)] - m[(i, j)] * m[(j, i)];
    (t, minor(0, 1) + minor(0, 2) + minor(1, 2), m.determinant())
}

/// Real roots of `x^3 - T x^2 + M x - D`, or `None` for a complex pair.
pub fn cubic_real_roots(t: f64, m: f64, d: f64) -> Option<[f64; 3]> {
    // depressed form x = y + T/3: y^3 + p y + q
    let shift = t / 3.0;
    let p = m - t * t / 3.0;
    let q = -2.0 * t * t * t / 27.0 + t * m / 3.0 - d;
    let scale = 1.0 + t.abs() + m.abs().sqrt() + d.abs().cbrt();
    if p.abs() <= 1e-15 * scale * scale {
        let y = (-q).cbrt();
        return Some([y + shift; 3]);
    }
    let disc = 4.0 * p * p * p + 27.0 * q * q;
    let size = 4.0 * (p * p * p).abs() + 27.0 * q * q;
    if p > 0.0 || disc > 1e-12 * size {
        return None;
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = r * (theta - 2.0 * PI * k as f64 / 3.0).cos() + shift;
    }
    Some(out)
}

fn newton_polish(x: f64, t: f64, m: f64, d: f64) -> f64 {
    let mut x = x;
    for _ in 0..3 {
        let f = ((x - t) * x + m) * x - d;
        let df = (3.0 * x - 2.0 * t) * x + m;
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        if !step.is_finite() || step.abs() > 1e-6 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
    }
    x
}

/// Null vector of a (near) rank-two matrix: the largest cross product of
/// two rows.
fn null_vector(a: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let r = [a.row(0).transpose(), a.row(1).transpose(), a.row(2).transpose()];
    let candidates = [r[0].cross(&r[1]), r[0].cross(&r[2]), r[1].cross(&r[2])];
    let best = candidates.into_iter().max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))?;
    (best.norm() > 0.0).then_some(best)
}

fn rayleigh(g: &Matrix3<f64>, lambda: f64) -> (f64, Option<Vector3<f64>>) {
    let shifted = g - Matrix3::identity() * lambda;
    let (Some(v), Some(w)) = (null_vector(&shifted), null_vector(&shifted.transpose())) else {
        return (lambda, None);
    };
    let denom = w.dot(&v);
    if denom.abs() <= 1e-12 * w.norm() * v.norm() {
        return (lambda, Some(v));
    }
    (w.dot(&(g * v)) / denom, Some(v))
}

pub fn eigen3(g: &GroupElement) -> Result<EigenTriple> {
    eigen3_with_gap(g, tolerance::SPECTRAL_GAP)
}

pub fn eigen3_with_gap(g: &GroupElement, gap: f64) -> Result<EigenTriple> {
    let m = g.mat();
    let (t, mi, d) = char_poly(m);
    let mut roots = cubic_real_roots(t, mi, d).ok_or(FlagError::ComplexSpectrum)?;
    for r in roots.iter_mut() {
        *r = newton_polish(*r, t, mi, d);
    }
    roots.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let ratio_ok = |a: f64, b: f64| b != 0.0 && a.abs() / b.abs() >= 1.0 + gap;
    let near_degenerate = !(ratio_ok(roots[0], roots[1]) && ratio_ok(roots[1], roots[2]));

    let fallback = |i: usize| -> Vector3<f64> {
        let mut e = Vector3::zeros();
        e[i] = 1.0;
        e
    };
    if near_degenerate {
        let vectors = [0, 1, 2].map(|i| {
            let v = null_vector(&(m - Matrix3::identity() * roots[i])).unwrap_or_else(|| fallback(i));
            ProjPoint::new(v).expect("nonzero")
        });
        return Ok(EigenTriple { values: roots, vectors, near_degenerate });
    }

    // two refinement passes of the two-sided Rayleigh quotient
    let refine = |x: f64| {
        let (x, _) = rayleigh(m, x);
        rayleigh(m, x)
    };
    let (l1, v1) = refine(roots[0]);
    let (l2, v2) = refine(roots[1]);
    let (l3, v3) = refine(roots[2]);
    let values = [l1, l2, l3];
    let vectors = [(v1, 0), (v2, 1), (v3, 2)].map(|(v, i)| ProjPoint::new(v.unwrap_or_else(|| fallback(i))).expect("nonzero"));
    Ok(EigenTriple { values, vectors, near_degenerate })
}

pub fn is_loxodromic(g: &GroupElement) -> bool {
    matches!(eigen3(g), Ok(e) if !e.near_degenerate)
}

/// Attractive fixed flag `([v1], [v1 v2])` of a loxodromic element.
pub fn attractive_flag(g: &GroupElement) -> Result<Flag> {
    let e = eigen3(g).map_err(|_| FlagError::NotLoxodromic)?;
    if e.near_degenerate {
        return Err(FlagError::NotLoxodromic);
    }
    let line = join(&e.vectors[0], &e.vectors[1]).map_err(|_| FlagError::NotLoxodromic)?;
    Ok(Flag { point: e.vectors[0], line })
}

/// Same flag with the line taken as the top eigencovector of `g*`.
pub fn attractive_flag_dual(g: &GroupElement) -> Result<Flag> {
    let e = eigen3(g).map_err(|_| FlagError::NotLoxodromic)?;
    let ed = eigen3(&g.dual()).map_err(|_| FlagError::NotLoxodromic)?;
    if e.near_degenerate || ed.near_degenerate {
        return Err(FlagError::NotLoxodromic);
    }
    let line = ProjLine::new(*ed.vectors[0].rep()).expect("unit");
    Ok(Flag { point: e.vectors[0], line })
}

pub fn cartan(g: &GroupElement) -> CartanTriple {
    let mut a = *g.mat();
    let mut v = Matrix3::identity();
    for _ in 0..64 {
        let mut rotated = false;
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let alpha = a.column(p).norm_squared();
            let beta = a.column(q).norm_squared();
            let gamma = a.column(p).dot(&a.column(q));
            if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            for mat in [&mut a, &mut v] {
                let cp = mat.column(p).clone_owned();
                let cq = mat.column(q).clone_owned();
                mat.set_column(p, &(cp * c - cq * s));
                mat.set_column(q, &(cp * s + cq * c));
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order = [0usize, 1, 2];
    let norms = [a.column(0).norm(), a.column(1).norm(), a.column(2).norm()];
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut l = Matrix3::from_columns(&[v.column(order[0]), v.column(order[1]), v.column(order[2])]);
    if l.determinant() < 0.0 {
        let c = -l.column(2);
        l.set_column(2, &c);
    }
    let u1 = a.column(order[0]) / norms[order[0]];
    let mut u2 = a.column(order[1]) / norms[order[1]];
    u2 -= u1 * u1.dot(&u2);
    u2.normalize_mut();
    let u3 = u1.cross(&u2);
    let k = Matrix3::from_columns(&[u1, u2, u3]);
    let gm = g.mat();
    let values = [0, 1, 2].map(|i| k.column(i).dot(&(gm * l.column(i))));
    CartanTriple { k, l, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SaddleType {
    Saddle,
    NotSaddle,
    /// The modulus at `e2` is within the gap of another one.
    Degenerate,
}

/// Position of the `e2` eigenvalue among the moduli of a matrix fixing `[e2]`.
pub fn saddle_classification(g: &GroupElement, gap: f64) -> Result<SaddleType> {
    let m = g.mat();
    let col = m.column(1).clone_owned();
    let angle = col.cross(&Vector3::y()).norm().atan2(col[1].abs());
    if angle > tolerance::USER_INCIDENCE {
        return Err(FlagError::NotFixed { angle });
    }
    let beta = m[(1, 1)];
    // induced action on V / e2; its determinant is 1 / beta for det g = 1
    let tr = m[(0, 0)] + m[(2, 2)];
    let det = 1.0 / beta;
    let disc = tr * tr / 4.0 - det;
    if disc < 0.0 {
        // complex pair of modulus sqrt(det) on both sides
        return Ok(SaddleType::NotSaddle);
    }
    let big = tr.abs() / 2.0 + disc.sqrt();
    let small = det.abs() / big;
    let b = beta.abs();
    if b > small * (1.0 + gap) && b * (1.0 + gap) < big {
        Ok(SaddleType::Saddle)
    } else if b * (1.0 + gap) <= small || b >= big * (1.0 + gap) {
        Ok(SaddleType::NotSaddle)
    } else {
        Ok(SaddleType::Degenerate)
    }
}

pub fn saddle_at_e2(g: &GroupElement) -> Result<bool> {
    Ok(saddle_classification(g, tolerance::SPECTRAL_GAP)? == SaddleType::Saddle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(a: f64, b: f64, c: f64) -> GroupElement {
        GroupElement::new(Matrix3::from_diagonal(&Vector3::new(a, b, c))).unwrap()
    }

    #[test]
    fn diagonal_eigen() {
        let e = eigen3(&diag(4.0, 1.0, 0.25)).unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        assert!((e.values[2] - 0.25).abs() < 1e-14);
        for i in 0..3 {
            assert!(e.vectors[i].approx_eq(&ProjPoint::basis(i), 1e-14));
        }
    }

    #[test]
    fn rotation_block_is_complex() {
        let (s, c) = 0.7f64.sin_cos();
        let g = GroupElement::new(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(eigen3(&g), Err(FlagError::ComplexSpectrum));
        assert!(!is_loxodromic(&g));
    }

    #[test]
    fn loxodromic_examples() {
        assert!(!is_loxodromic(&GroupElement::identity()));
        assert!(is_loxodromic(&diag(4.0, 1.0, 0.25)));
        let f = attractive_flag(&diag(4.0, 1.0, 0.25)).unwrap();
        assert!(f.point.approx_eq(&ProjPoint::basis(0), 1e-14));
        assert!(f.line.approx_eq(&ProjLine::basis(2), 1e-14));
        assert_eq!(attractive_flag(&GroupElement::identity()), Err(FlagError::NotLoxodromic));
    }

    #[test]
    fn repulsive_flag_from_inverse() {
        let g = diag(4.0, 1.0, 0.25);
        let f = attractive_flag(&g.inverse()).unwrap();
        assert!(f.point.approx_eq(&ProjPoint::basis(2), 1e-14));
        assert!(f.line.approx_eq(&ProjLine::basis(0), 1e-14));
    }

    #[test]
    fn cartan_of_diagonal() {
        let c = cartan(&diag(4.0, 1.0, 0.25));
        assert!((c.values[0] - 4.0).abs() < 1e-14 && (c.values[1] - 1.0).abs() < 1e-14);
        assert!((c.values[2] - 0.25).abs() < 1e-14);
        assert!((c.k.abs() - Matrix3::identity()).norm() < 1e-14);
        assert!((c.l.abs() - Matrix3::identity()).norm() < 1e-14);
    }

    #[test]
    fn saddle_examples() {
        assert!(saddle_at_e2(&diag(4.0, 1.0, 0.25)).unwrap());
        assert!(!saddle_at_e2(&diag(2.0, 0.25, 2.0)).unwrap());
        let g = GroupElement::new(Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0)).unwrap();
        assert!(matches!(saddle_at_e2(&g), Err(FlagError::NotFixed { .. })));
        assert_eq!(saddle_classification(&diag(4.0, 0.5, 0.5), 1e-8).unwrap(), SaddleType::Degenerate);
        assert_eq!(saddle_classification(&diag(2.0, 0.25, 2.0), 1e-8).unwrap(), SaddleType::NotSaddle);
    }
}
