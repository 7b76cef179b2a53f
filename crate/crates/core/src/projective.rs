//! Points, lines and flags of the projective plane, the frame variety and
//! the SL(3,R) actions on them.
//!
//! Homogeneous representatives are unit vectors whose first coordinate of
//! magnitude above [`SIGN_FLOOR`] is positive. Equality is angular.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{FlagError, Result};
use crate::tolerance;

/// Coordinates at or below this magnitude are skipped when choosing the sign.
pub const SIGN_FLOOR: f64 = 1e-14;

/// Unit-norm, sign-canonical representative of a nonzero vector.
///
/// Idempotent bit for bit: a vector whose norm is within a few ulps of one
/// is not rescaled again.
pub fn canonicalize(v: &Vector3<f64>) -> Result<Vector3<f64>> {
    let n = v.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(FlagError::ZeroVector);
    }
    let mut out = if (n - 1.0).abs() > 4.0 * f64::EPSILON { v / n } else { *v };
    if let Some(&c) = out.iter().find(|c| c.abs() > SIGN_FLOOR) {
        if c < 0.0 {
            out = -out;
        }
    }
    Ok(out)
}

/// Angle in `[0, pi/2]` between the projective classes of two vectors.
pub fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let cross = a.cross(b).norm();
    let dot = a.dot(b).abs();
    cross.atan2(dot)
}

/// Chordal distance `sin(angle)` between projective classes.
pub fn chordal(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm() / (a.norm() * b.norm())
}

macro_rules! proj_class {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        #[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
        pub struct $name {
            rep: Vector3<f64>,
        }

        impl $name {
            pub fn new(v: Vector3<f64>) -> Result<Self> {
                Ok(Self { rep: canonicalize(&v)? })
            }

            pub fn from_coords(x: f64, y: f64, z: f64) -> Result<Self> {
                Self::new(Vector3::new(x, y, z))
            }

            /// `i`-th standard basis class (0-based).
            pub fn basis(i: usize) -> Self {
                let mut v = Vector3::zeros();
                v[i] = 1.0;
                Self { rep: v }
            }

            pub fn rep(&self) -> &Vector3<f64> {
                &self.rep
            }

            pub fn angle_to(&self, other: &Self) -> f64 {
                angle_between(&self.rep, &other.rep)
            }

            pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
                1.0 - self.rep.dot(&other.rep).abs() <= tol
            }
        }

        impl TryFrom<[f64; 3]> for $name {
            type Error = FlagError;
            fn try_from(v: [f64; 3]) -> Result<Self> {
                Self::new(Vector3::from(v))
            }
        }

        impl From<$name> for [f64; 3] {
            fn from(p: $name) -> [f64; 3] {
                [p.rep[0], p.rep[1], p.rep[2]]
            }
        }
    };
}

proj_class!(ProjPoint);
proj_class!(ProjLine);

/// Evaluation `<v | v*>` of unit representatives.
pub fn pairing(p: &ProjPoint, l: &ProjLine) -> f64 {
    p.rep.dot(&l.rep)
}

fn alternating(a: &Vector3<f64>, b: &Vector3<f64>) -> Result<Vector3<f64>> {
    if angle_between(a, b) <= tolerance::JOIN_ANGLE {
        return Err(FlagError::DegenerateJoin);
    }
    Ok(a.cross(b))
}

/// Line through two distinct points.
pub fn join(p: &ProjPoint, q: &ProjPoint) -> Result<ProjLine> {
    ProjLine::new(alternating(&p.rep, &q.rep)?)
}

/// Intersection point of two distinct lines.
pub fn meet(l1: &ProjLine, l2: &ProjLine) -> Result<ProjPoint> {
    ProjPoint::new(alternating(&l1.rep, &l2.rep)?)
}

/// The pencil of lines through a point: the projective line `[p^perp]` of
/// the dual plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePencil {
    pub center: ProjPoint,
}

/// The points of a line, seen as the projective line `[l^perp]` of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRange {
    pub line: ProjLine,
}

fn orthonormal_complement(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let i = v.iamin();
    let mut e = Vector3::zeros();
    e[i] = 1.0;
    let a = v.cross(&e).normalize();
    let b = v.cross(&a).normalize();
    (a, b)
}

impl LinePencil {
    pub fn contains(&self, l: &ProjLine, tol: f64) -> bool {
        pairing(&self.center, l).abs() <= tol
    }

    /// Member line at angle `theta` in a fixed orthonormal basis of `p^perp`.
    pub fn member(&self, theta: f64) -> ProjLine {
        let (a, b) = orthonormal_complement(&self.center.rep);
        ProjLine::new(a * theta.cos() + b * theta.sin()).expect("unit combination")
    }
}

impl PointRange {
    pub fn contains(&self, p: &ProjPoint, tol: f64) -> bool {
        pairing(p, &self.line).abs() <= tol
    }

    pub fn member(&self, theta: f64) -> ProjPoint {
        let (a, b) = orthonormal_complement(&self.line.rep);
        ProjPoint::new(a * theta.cos() + b * theta.sin()).expect("unit combination")
    }
}

pub fn perp_point(p: &ProjPoint) -> LinePencil {
    LinePencil { center: *p }
}

pub fn perp_line(l: &ProjLine) -> PointRange {
    PointRange { line: *l }
}

/// An element of the flag variety X.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub point: ProjPoint,
    pub line: ProjLine,
}

impl Flag {
    pub fn new(point: ProjPoint, line: ProjLine, tol: f64) -> Result<Self> {
        let pr = pairing(&point, &line);
        if pr.abs() > tol {
            return Err(FlagError::NotIncident { pairing: pr.abs() });
        }
        Ok(Self { point, line })
    }

    /// Max of the angular distances of points and of lines.
    pub fn distance(&self, other: &Flag) -> f64 {
        self.point.angle_to(&other.point).max(self.line.angle_to(&other.line))
    }

    pub fn approx_eq(&self, other: &Flag, tol: f64) -> bool {
        self.point.approx_eq(&other.point, tol) && self.line.approx_eq(&other.line, tol)
    }
}

/// Triple of non-collinear points: an element of the frame variety Y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub p1: ProjPoint,
    pub p2: ProjPoint,
    pub p3: ProjPoint,
}

impl Frame {
    pub fn new(p1: ProjPoint, p2: ProjPoint, p3: ProjPoint) -> Result<Self> {
        let det = Matrix3::from_columns(&[p1.rep, p2.rep, p3.rep]).determinant();
        if det.abs() <= tolerance::FRAME_DET {
            return Err(FlagError::Collinear { det: det.abs() });
        }
        Ok(Self { p1, p2, p3 })
    }

    pub fn act(&self, g: &GroupElement) -> Frame {
        Frame { p1: g.act(&self.p1), p2: g.act(&self.p2), p3: g.act(&self.p3) }
    }
}

pub fn pi_plus(f: &Frame) -> Result<Flag> {
    let line = join(&f.p1, &f.p2)?;
    Ok(Flag { point: f.p1, line })
}

pub fn pi_minus(f: &Frame) -> Result<Flag> {
    let line = join(&f.p3, &f.p2)?;
    Ok(Flag { point: f.p3, line })
}

/// Whether two flags are in general position (cross pairings nonzero).
pub fn is_in_y(f1: &Flag, f2: &Flag, tol: f64) -> bool {
    pairing(&f1.point, &f2.line).abs() > tol && pairing(&f2.point, &f1.line).abs() > tol
}

/// The frame `(p1, l1 ^ l2, p2)` whose projections are `(f1, f2)`.
pub fn frame_from_flags(f1: &Flag, f2: &Flag, tol: f64) -> Result<Frame> {
    if !is_in_y(f1, f2, tol) {
        return Err(FlagError::NotInY);
    }
    let mid = meet(&f1.line, &f2.line)?;
    Frame::new(f1.point, mid, f2.point)
}

/// An element of SL(3,R).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    mat: Matrix3<f64>,
}

impl GroupElement {
    pub fn new(mat: Matrix3<f64>) -> Result<Self> {
        let det = mat.determinant();
        if (det - 1.0).abs() > tolerance::UNIMODULAR {
            return Err(FlagError::NotUnimodular { det });
        }
        Ok(Self { mat })
    }

    /// Rescales by the real cube root of the determinant.
    pub fn normalized(mat: Matrix3<f64>) -> Result<Self> {
        let det = mat.determinant();
        if det.abs() < tolerance::SINGULAR {
            return Err(FlagError::SingularMatrix { det });
        }
        Ok(Self { mat: mat / det.cbrt() })
    }

    /// Wraps a matrix whose determinant is one by construction.
    pub(crate) fn from_exact(mat: Matrix3<f64>) -> Self {
        Self { mat }
    }

    pub fn identity() -> Self {
        Self { mat: Matrix3::identity() }
    }

    pub fn mat(&self) -> &Matrix3<f64> {
        &self.mat
    }

    /// Inverse through the adjugate.
    pub fn inverse(&self) -> GroupElement {
        GroupElement { mat: adjugate(&self.mat) / self.mat.determinant() }
    }

    /// `g* = (g^T)^{-1}`, acting on covectors.
    pub fn dual(&self) -> GroupElement {
        GroupElement { mat: self.inverse().mat.transpose() }
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { mat: self.mat * other.mat }
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.mat * v
    }

    /// `g* v*` without renormalization.
    pub fn apply_dual(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.inverse().mat.transpose() * v
    }

    pub fn act(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::new(self.apply(&p.rep)).expect("invertible image of a unit vector")
    }

    pub fn act_dual(&self, l: &ProjLine) -> ProjLine {
        ProjLine::new(self.apply_dual(&l.rep)).expect("invertible image of a unit vector")
    }

    pub fn act_flag(&self, f: &Flag) -> Flag {
        Flag { point: self.act(&f.point), line: self.act_dual(&f.line) }
    }
}

pub fn act(g: &GroupElement, p: &ProjPoint) -> ProjPoint {
    g.act(p)
}

pub fn act_dual(g: &GroupElement, l: &ProjLine) -> ProjLine {
    g.act_dual(l)
}

pub fn dual(g: &GroupElement) -> GroupElement {
    g.dual()
}

pub(crate) fn adjugate(m: &Matrix3<f64>) -> Matrix3<f64> {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)];
    Matrix3::new(
        c(1, 2, 1, 2),
        -c(0, 2, 1, 2),
        c(0, 1, 1, 2),
        -c(1, 2, 0, 2),
        c(0, 2, 0, 2),
        -c(0, 1, 0, 2),
        c(1, 2, 0, 1),
        -c(0, 2, 0, 1),
        c(0, 1, 0, 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> ProjPoint {
        ProjPoint::basis(i)
    }
    fn es(i: usize) -> ProjLine {
        ProjLine::basis(i)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&e(0), &es(0)), 1.0);
        assert_eq!(pairing(&e(0), &es(2)), 0.0);
        let p = ProjPoint::from_coords(1.0, 2.0, 3.0).unwrap();
        let l = ProjLine::from_coords(4.0, 5.0, 6.0).unwrap();
        let expected = 32.0 / (14.0f64 * 77.0).sqrt();
        assert!((pairing(&p, &l) - expected).abs() < 1e-15);
    }

    #[test]
    fn join_and_meet_of_basis() {
        assert!(join(&e(0), &e(1)).unwrap().approx_eq(&es(2), 1e-15));
        assert_eq!(join(&e(0), &e(0)), Err(FlagError::DegenerateJoin));
        assert!(meet(&es(0), &es(1)).unwrap().approx_eq(&e(2), 1e-15));
        assert_eq!(meet(&es(0), &es(0)), Err(FlagError::DegenerateJoin));
    }

    #[test]
    fn canonical_sign() {
        let p = ProjPoint::from_coords(0.0, -3.0, 4.0).unwrap();
        assert_eq!(p.rep(), &Vector3::new(0.0, 0.6, -0.8));
        assert_eq!(ProjPoint::from_coords(0.0, 0.0, 0.0), Err(FlagError::ZeroVector));
    }

    #[test]
    fn pencil_membership() {
        let pencil = perp_point(&e(1));
        assert!(pencil.contains(&es(0), 1e-12));
        assert!(pencil.contains(&es(2), 1e-12));
        assert!(!pencil.contains(&es(1), 1e-12));
        let l1 = pencil.member(0.3);
        let l2 = pencil.member(1.4);
        assert!(meet(&l1, &l2).unwrap().approx_eq(&e(1), 1e-12));
        let range = perp_line(&es(1));
        assert!(range.contains(&range.member(2.0), 1e-12));
    }

    #[test]
    fn projections_of_standard_frame() {
        let f = Frame::new(e(0), e(1), e(2)).unwrap();
        let plus = pi_plus(&f).unwrap();
        let minus = pi_minus(&f).unwrap();
        assert!(plus.point.approx_eq(&e(0), 1e-15) && plus.line.approx_eq(&es(2), 1e-15));
        assert!(minus.point.approx_eq(&e(2), 1e-15) && minus.line.approx_eq(&es(0), 1e-15));
        assert!(is_in_y(&plus, &minus, tolerance::INCIDENCE));
        assert!(!is_in_y(&plus, &plus, tolerance::INCIDENCE));
        let back = frame_from_flags(&plus, &minus, tolerance::INCIDENCE).unwrap();
        assert!(back.p2.approx_eq(&e(1), 1e-15));
        assert_eq!(frame_from_flags(&plus, &plus, tolerance::INCIDENCE).unwrap_err(), FlagError::NotInY);
    }

    #[test]
    fn collinear_frame_rejected() {
        let q = ProjPoint::from_coords(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(Frame::new(e(0), e(1), q), Err(FlagError::Collinear { .. })));
    }

    #[test]
    fn dual_of_diagonal() {
        assert_eq!(GroupElement::identity().dual(), GroupElement::identity());
        let g = GroupElement::new(Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 0.5))).unwrap();
        let d = g.dual();
        assert!((d.mat() - Matrix3::from_diagonal(&Vector3::new(0.5, 1.0, 2.0))).norm() < 1e-15);
    }

    #[test]
    fn unimodular_check() {
        let m = Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 1.0));
        assert!(matches!(GroupElement::new(m), Err(FlagError::NotUnimodular { .. })));
        let g = GroupElement::normalized(m).unwrap();
        assert!((g.mat().determinant() - 1.0).abs() < 1e-14);
        assert!(matches!(GroupElement::normalized(Matrix3::zeros()), Err(FlagError::SingularMatrix { .. })));
    }

    #[test]
    fn flag_incidence_enforced() {
        assert!(Flag::new(e(0), es(2), tolerance::INCIDENCE).is_ok());
        assert!(matches!(Flag::new(e(0), es(0), tolerance::INCIDENCE), Err(FlagError::NotIncident { .. })));
    }
}
