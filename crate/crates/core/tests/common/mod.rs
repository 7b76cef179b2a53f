#![allow(dead_code)]

use flagcurve_core::projective::{Flag, GroupElement, ProjLine, ProjPoint};
use flagcurve_core::representation::{coboundary_radial, RepSpec};
use flagcurve_core::surface::{standard_fuchsian, translation_length, CohomologyClass, FuchsianSeed};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn seed2() -> FuchsianSeed {
    standard_fuchsian(2).unwrap()
}

pub fn canonical() -> RepSpec {
    RepSpec::canonical(seed2())
}

/// `u` supported on `a1` with `|u(a1)| / t(a1) = ratio`.
pub fn a1_class(ratio: f64) -> CohomologyClass {
    let seed = seed2();
    let t = translation_length(&seed.generators()[0]).unwrap();
    CohomologyClass::new(vec![ratio * t, 0.0, 0.0, 0.0]).unwrap()
}

pub fn linear(ratio: f64) -> RepSpec {
    RepSpec::linear_u(seed2(), a1_class(ratio)).unwrap()
}

pub fn coboundary(m1: f64, m2: f64) -> RepSpec {
    coboundary_radial(&canonical(), m1, m2).unwrap()
}

pub fn random_vec(r: &mut impl Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if v.norm() > 0.1 {
            return v;
        }
    }
}

pub fn random_point(r: &mut impl Rng) -> ProjPoint {
    ProjPoint::new(random_vec(r)).unwrap()
}

pub fn random_line(r: &mut impl Rng) -> ProjLine {
    ProjLine::new(random_vec(r)).unwrap()
}

/// Random flag: a point and a random line through it.
pub fn random_flag(r: &mut impl Rng) -> Flag {
    let p = random_point(r);
    let w = random_vec(r);
    let c = p.rep().cross(&w);
    Flag::new(p, ProjLine::new(c).unwrap(), 1e-10).unwrap()
}

pub fn random_matrix(r: &mut impl Rng) -> Matrix3<f64> {
    loop {
        let m = Matrix3::from_fn(|_, _| r.gen_range(-2.0..2.0));
        let det: f64 = m.determinant();
        if det.abs() > 0.05 {
            return m / det.cbrt();
        }
    }
}

pub fn random_group_element(r: &mut impl Rng) -> GroupElement {
    GroupElement::new(random_matrix(r)).unwrap()
}
