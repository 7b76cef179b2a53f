//! Representation families of the surface group in SL(3,R) and the
//! SL(2,R) flows.
//!
//! * canonical: the block embedding `rho0` of the seed,
//! * linear u-deformation: `phi(u(w)) * rho0(w)`,
//! * radial: generator images `[[e^{u/3} a, 0, e^{u/3} b], [mu, e^{-2u/3}, nu], [e^{u/3} c, 0, e^{u/3} d]]`,
//! * explicit: arbitrary generator images in SL(3,R).

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{FlagError, Result};
use crate::projective::{adjugate, GroupElement};
use crate::surface::{eval_u, generator_index, generator_name, CohomologyClass, FuchsianSeed, Letter, Word};
use crate::tolerance;

/// Products along words are renormalized to determinant one this often.
const RENORMALIZE_EVERY: usize = 16;

/// Canonical block embedding SL(2,R) -> SL(3,R) fixing `e2`.
pub fn rho0(m: &Matrix2<f64>) -> Result<GroupElement> {
    let det = m.determinant();
    if (det - 1.0).abs() > tolerance::UNIMODULAR {
        return Err(FlagError::NotUnimodular { det });
    }
    Ok(GroupElement::from_exact(rho0_matrix(m)))
}

fn rho0_matrix(m: &Matrix2<f64>) -> Matrix3<f64> {
    Matrix3::new(m[(0, 0)], 0.0, m[(0, 1)], 0.0, 1.0, 0.0, m[(1, 0)], 0.0, m[(1, 1)])
}

/// `diag(e^{t/3}, e^{-2t/3}, e^{t/3})`; commutes with the image of `rho0`.
pub fn phi(t: f64) -> GroupElement {
    GroupElement::from_exact(Matrix3::from_diagonal(&Vector3::new((t / 3.0).exp(), (-2.0 * t / 3.0).exp(), (t / 3.0).exp())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub t: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2Flows {
    /// `a^t = diag(e^t, e^{-t})`
    pub a: Matrix2<f64>,
    /// `h^s_+ = [[1, s], [0, 1]]`
    pub h_plus: Matrix2<f64>,
    /// `h^s_- = [[1, 0], [s, 1]]`
    pub h_minus: Matrix2<f64>,
}

pub fn sl2_flows(p: FlowParams) -> Sl2Flows {
    Sl2Flows {
        a: Matrix2::new(p.t.exp(), 0.0, 0.0, (-p.t).exp()),
        h_plus: Matrix2::new(1.0, p.s, 0.0, 1.0),
        h_minus: Matrix2::new(1.0, 0.0, p.s, 1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepVariant {
    Canonical,
    LinearU { u: CohomologyClass },
    Radial { u: CohomologyClass, mu: Vec<f64>, nu: Vec<f64> },
    Explicit,
}

/// A validated representation of the surface group of `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepSpec {
    seed: FuchsianSeed,
    variant: RepVariant,
    /// Generator images and their inverses, indexed by letter code.
    letters: Vec<Matrix3<f64>>,
}

impl RepSpec {
    pub fn canonical(seed: FuchsianSeed) -> Self {
        Self::assemble(seed, RepVariant::Canonical, |s, l| rho0_matrix(s.letter(l)))
    }

    pub fn linear_u(seed: FuchsianSeed, u: CohomologyClass) -> Result<Self> {
        check_len("u", u.values().len(), &seed)?;
        Ok(Self::assemble(seed, RepVariant::LinearU { u: u.clone() }, |s, l| {
            phi(u.letter(l)).mat() * rho0_matrix(s.letter(l))
        }))
    }

    /// Radial representation from per-generator `(mu, nu)`; the relator
    /// residual enforces the cocycle condition on `(mu, nu)`.
    pub fn radial(seed: FuchsianSeed, u: CohomologyClass, mu: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        check_len("u", u.values().len(), &seed)?;
        check_len("mu", mu.len(), &seed)?;
        check_len("nu", nu.len(), &seed)?;
        if mu.iter().chain(nu.iter()).any(|v| !v.is_finite()) {
            return Err(FlagError::InvalidSpec("non-finite mu/nu".into()));
        }
        let gens: Vec<Matrix3<f64>> = (0..seed.presentation().generator_count())
            .map(|i| radial_matrix(&seed.generators()[i], u.values()[i], mu[i], nu[i]))
            .collect();
        let spec = Self::from_generators(seed, RepVariant::Radial { u, mu, nu }, gens);
        spec.check_relator()?;
        Ok(spec)
    }

    /// Arbitrary generator images; each is rescaled to determinant one.
    pub fn explicit(seed: FuchsianSeed, generators: Vec<Matrix3<f64>>) -> Result<Self> {
        check_len("matrices", generators.len(), &seed)?;
        let gens = generators
            .into_iter()
            .map(|m| GroupElement::normalized(m).map(|g| *g.mat()))
            .collect::<Result<Vec<_>>>()?;
        let spec = Self::from_generators(seed, RepVariant::Explicit, gens);
        spec.check_relator()?;
        Ok(spec)
    }

    fn assemble(seed: FuchsianSeed, variant: RepVariant, image: impl Fn(&FuchsianSeed, Letter) -> Matrix3<f64>) -> Self {
        let letters = (0..seed.presentation().letter_count()).map(|c| image(&seed, Letter::from_code(c))).collect();
        Self { seed, variant, letters }
    }

    fn from_generators(seed: FuchsianSeed, variant: RepVariant, gens: Vec<Matrix3<f64>>) -> Self {
        let letters = gens.iter().flat_map(|g| [*g, adjugate(g) / g.determinant()]).collect();
        Self { seed, variant, letters }
    }

    fn check_relator(&self) -> Result<()> {
        let residual = self.relator_residual();
        if !(residual <= tolerance::RELATOR) {
            return Err(FlagError::RelatorResidual { residual, bound: tolerance::RELATOR });
        }
        Ok(())
    }

    /// Distance of the relator image to the identity (projectively).
    pub fn relator_residual(&self) -> f64 {
        let r = self.evaluate(&self.seed.presentation().relator());
        (r.mat() - Matrix3::identity()).norm()
    }

    pub fn seed(&self) -> &FuchsianSeed {
        &self.seed
    }

    pub fn variant(&self) -> &RepVariant {
        &self.variant
    }

    pub fn variant_name(&self) -> &'static str {
        match self.variant {
            RepVariant::Canonical => "canonical",
            RepVariant::LinearU { .. } => "linear_u",
            RepVariant::Radial { .. } => "radial",
            RepVariant::Explicit => "explicit",
        }
    }

    /// The morphism `u` of the canonical, linear or radial families.
    pub fn u(&self) -> Option<CohomologyClass> {
        match &self.variant {
            RepVariant::Canonical => Some(CohomologyClass::zero(self.seed.genus())),
            RepVariant::LinearU { u } | RepVariant::Radial { u, .. } => Some(u.clone()),
            RepVariant::Explicit => None,
        }
    }

    /// Image of a single generator.
    pub fn generator(&self, index: usize) -> GroupElement {
        GroupElement::from_exact(self.letters[2 * index])
    }

    pub fn letter(&self, l: Letter) -> &Matrix3<f64> {
        &self.letters[l.code()]
    }

    pub fn evaluate(&self, w: &Word) -> GroupElement {
        match &self.variant {
            RepVariant::Canonical => GroupElement::from_exact(rho0_matrix(&self.seed.image(w))),
            RepVariant::LinearU { u } => {
                GroupElement::from_exact(phi(eval_u(u, w)).mat() * rho0_matrix(&self.seed.image(w)))
            }
            RepVariant::Radial { .. } | RepVariant::Explicit => {
                let mut acc = Matrix3::identity();
                for (i, l) in w.letters().iter().enumerate() {
                    acc *= self.letter(*l);
                    if (i + 1) % RENORMALIZE_EVERY == 0 {
                        acc /= acc.determinant().cbrt();
                    }
                }
                GroupElement::from_exact(acc)
            }
        }
    }

    pub fn to_json(&self) -> RepSpecJson {
        let named = |vals: &[f64]| -> BTreeMap<String, f64> {
            vals.iter().enumerate().map(|(i, v)| (generator_name(i), *v)).collect()
        };
        let mut j = RepSpecJson {
            variant: self.variant_name().to_string(),
            seed: self.seed.clone(),
            u: None,
            mu: None,
            nu: None,
            matrices: None,
            coboundary: None,
        };
        match &self.variant {
            RepVariant::Canonical => {}
            RepVariant::LinearU { u } => j.u = Some(named(u.values())),
            RepVariant::Radial { u, mu, nu } => {
                j.u = Some(named(u.values()));
                j.mu = Some(named(mu));
                j.nu = Some(named(nu));
            }
            RepVariant::Explicit => {
                j.matrices = Some(
                    (0..self.seed.presentation().generator_count())
                        .map(|i| {
                            let m = self.letters[2 * i];
                            let row_major: Vec<f64> = (0..3).flat_map(|r| (0..3).map(move |c| m[(r, c)])).collect();
                            (generator_name(i), row_major)
                        })
                        .collect(),
                )
            }
        }
        j
    }
}

fn check_len(field: &str, len: usize, seed: &FuchsianSeed) -> Result<()> {
    let want = seed.presentation().generator_count();
    if len != want {
        return Err(FlagError::InvalidSpec(format!("{field}: expected {want} values, got {len}")));
    }
    Ok(())
}

fn radial_matrix(m: &Matrix2<f64>, u: f64, mu: f64, nu: f64) -> Matrix3<f64> {
    let s = (u / 3.0).exp();
    let mid = (-2.0 * u / 3.0).exp();
    Matrix3::new(s * m[(0, 0)], 0.0, s * m[(0, 1)], mu, mid, nu, s * m[(1, 0)], 0.0, s * m[(1, 1)])
}

/// Radial spec obtained by conjugating a linear u-deformation by the
/// unipotent `U` with middle row `(m1, 1, m2)`: generator images become
/// `U^{-1} g U`, whose invariant curve is the plane `z = -(m1 x + m2 y)`.
pub fn coboundary_radial(spec: &RepSpec, m1: f64, m2: f64) -> Result<RepSpec> {
    let u = match spec.variant() {
        RepVariant::Canonical => CohomologyClass::zero(spec.seed.genus()),
        RepVariant::LinearU { u } => u.clone(),
        _ => return Err(FlagError::UnsupportedSpec(spec.variant_name())),
    };
    let n = spec.seed.presentation().generator_count();
    let (mut mu, mut nu) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let m = spec.seed.generators()[i];
        let s = (u.values()[i] / 3.0).exp();
        let mid = (-2.0 * u.values()[i] / 3.0).exp();
        mu.push(m1 * mid - m1 * s * m[(0, 0)] - m2 * s * m[(1, 0)]);
        nu.push(m2 * mid - m1 * s * m[(0, 1)] - m2 * s * m[(1, 1)]);
    }
    RepSpec::radial(spec.seed.clone(), u, mu, nu)
}

/// Conjugation of a radial spec by `phi(t)`: `(mu, nu)` scale by `e^{-t}`.
pub fn phi_conjugate(spec: &RepSpec, t: f64) -> Result<RepSpec> {
    match spec.variant() {
        RepVariant::Radial { u, mu, nu } => {
            let f = (-t).exp();
            RepSpec::radial(
                spec.seed.clone(),
                u.clone(),
                mu.iter().map(|v| v * f).collect(),
                nu.iter().map(|v| v * f).collect(),
            )
        }
        _ => Err(FlagError::NotRadial),
    }
}

/// JSON form of a [`RepSpec`]. Generator-keyed maps default missing
/// generators to zero. A radial spec may give `coboundary` instead of
/// `mu`/`nu`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpecJson {
    pub variant: String,
    pub seed: FuchsianSeed,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coboundary: Option<Coboundary>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coboundary {
    pub m1: f64,
    pub m2: f64,
}

fn per_generator(map: &Option<BTreeMap<String, f64>>, n: usize) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    if let Some(map) = map {
        for (k, v) in map {
            let i = generator_index(k)?;
            if i >= n {
                return Err(FlagError::UnknownGenerator(k.clone()));
            }
            out[i] = *v;
        }
    }
    Ok(out)
}

impl TryFrom<RepSpecJson> for RepSpec {
    type Error = FlagError;

    fn try_from(j: RepSpecJson) -> Result<RepSpec> {
        let n = j.seed.presentation().generator_count();
        let u = CohomologyClass::new(per_generator(&j.u, n)?)?;
        match j.variant.as_str() {
            "canonical" => Ok(RepSpec::canonical(j.seed)),
            "linear_u" => RepSpec::linear_u(j.seed, u),
            "radial" => match j.coboundary {
                Some(c) if j.mu.is_none() && j.nu.is_none() => {
                    coboundary_radial(&RepSpec::linear_u(j.seed, u)?, c.m1, c.m2)
                }
                Some(_) => Err(FlagError::InvalidSpec("give either coboundary or mu/nu, not both".into())),
                None => RepSpec::radial(j.seed, u, per_generator(&j.mu, n)?, per_generator(&j.nu, n)?),
            },
            "explicit" => {
                let map = j.matrices.ok_or_else(|| FlagError::InvalidSpec("explicit variant needs matrices".into()))?;
                let mut gens = vec![None; n];
                for (k, v) in &map {
                    let i = generator_index(k)?;
                    if i >= n {
                        return Err(FlagError::UnknownGenerator(k.clone()));
                    }
                    if v.len() != 9 {
                        return Err(FlagError::InvalidSpec(format!("matrix {k} needs 9 entries")));
                    }
                    gens[i] = Some(Matrix3::from_row_slice(v));
                }
                let gens = gens
                    .into_iter()
                    .enumerate()
                    .map(|(i, g)| g.ok_or_else(|| FlagError::InvalidSpec(format!("missing matrix {}", generator_name(i)))))
                    .collect::<Result<Vec<_>>>()?;
                RepSpec::explicit(j.seed, gens)
            }
            other => Err(FlagError::InvalidSpec(format!("unknown variant {other:?}"))),
        }
    }
}
