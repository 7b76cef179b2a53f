//! Closed surface groups of genus g >= 2, a Fuchsian seed in SL(2,R), and
//! enumeration of freely reduced words.
//!
//! Generators are ordered `a1, b1, a2, b2, ...`; a [`Letter`] packs the
//! generator index and an inverse bit. Words print with lowercase generators
//! and uppercase inverses, e.g. `a1b1A1B1`.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{FlagError, Result};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator * 2 + inverse as usize) as u8)
    }

    pub fn from_code(code: usize) -> Self {
        Letter(code as u8)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

/// Name of generator `index`: `a1, b1, a2, b2, ...`.
pub fn generator_name(index: usize) -> String {
    let kind = if index % 2 == 0 { 'a' } else { 'b' };
    format!("{}{}", kind, index / 2 + 1)
}

pub fn generator_index(name: &str) -> Result<usize> {
    let mut chars = name.chars();
    let kind = chars.next().ok_or_else(|| FlagError::UnknownGenerator(name.to_string()))?;
    let n: usize = chars.as_str().parse().map_err(|_| FlagError::UnknownGenerator(name.to_string()))?;
    if n == 0 {
        return Err(FlagError::UnknownGenerator(name.to_string()));
    }
    match kind {
        'a' => Ok(2 * (n - 1)),
        'b' => Ok(2 * (n - 1) + 1),
        _ => Err(FlagError::UnknownGenerator(name.to_string())),
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.generator();
        let kind = match (g % 2 == 0, self.is_inverse()) {
            (true, false) => 'a',
            (true, true) => 'A',
            (false, false) => 'b',
            (false, true) => 'B',
        };
        write!(f, "{}{}", kind, g / 2 + 1)
    }
}

/// A freely reduced word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces the letter sequence.
    pub fn reduced(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => *a != b.inverse(),
            _ => true,
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        Word::reduced(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Shortlex comparison key.
    pub fn shortlex_key(&self) -> (usize, &[Letter]) {
        (self.0.len(), &self.0)
    }

    fn push(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(l);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Word {
    type Err = FlagError;

    fn from_str(s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let kind = bytes[i] as char;
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let n: usize = s[start..end].parse().map_err(|_| FlagError::InvalidWord(s.to_string()))?;
            if n == 0 {
                return Err(FlagError::InvalidWord(s.to_string()));
            }
            let (gen, inv) = match kind {
                'a' => (2 * (n - 1), false),
                'A' => (2 * (n - 1), true),
                'b' => (2 * (n - 1) + 1, false),
                'B' => (2 * (n - 1) + 1, true),
                _ => return Err(FlagError::InvalidWord(s.to_string())),
            };
            letters.push(Letter::new(gen, inv));
            i = end;
        }
        Ok(Word::reduced(letters))
    }
}

/// The standard one-relator presentation of a genus-g surface group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Presentation {
    pub genus: usize,
}

impl Presentation {
    pub fn new(genus: usize) -> Result<Self> {
        if genus < 2 {
            return Err(FlagError::UnsupportedGenus(genus));
        }
        Ok(Self { genus })
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus
    }

    pub fn letter_count(&self) -> usize {
        4 * self.genus
    }

    /// `[a1,b1]...[ag,bg]`.
    pub fn relator(&self) -> Word {
        let mut letters = Vec::with_capacity(4 * self.genus);
        for i in 0..self.genus {
            let (a, b) = (2 * i, 2 * i + 1);
            letters.extend([Letter::new(a, false), Letter::new(b, false), Letter::new(a, true), Letter::new(b, true)]);
        }
        Word(letters)
    }
}

pub fn inverse2(m: &Matrix2<f64>) -> Matrix2<f64> {
    Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / m.determinant()
}

/// A faithful discrete representation of the surface group into SL(2,R),
/// given by generator images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeedJson", into = "SeedJson")]
pub struct FuchsianSeed {
    presentation: Presentation,
    generators: Vec<Matrix2<f64>>,
    inverses: Vec<Matrix2<f64>>,
}

/// `{ "genus": g, "generators": [[m00, m01, m10, m11], ...] }`; generators
/// may be omitted to request the regular 4g-gon seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedJson {
    pub genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<[f64; 4]>>,
}

impl TryFrom<SeedJson> for FuchsianSeed {
    type Error = FlagError;
    fn try_from(j: SeedJson) -> Result<Self> {
        match j.generators {
            None => standard_fuchsian(j.genus),
            Some(gens) => {
                let mats = gens.iter().map(|g| Matrix2::new(g[0], g[1], g[2], g[3])).collect();
                FuchsianSeed::new(j.genus, mats)
            }
        }
    }
}

impl From<FuchsianSeed> for SeedJson {
    fn from(s: FuchsianSeed) -> SeedJson {
        SeedJson {
            genus: s.genus(),
            generators: Some(s.generators.iter().map(|m| [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]).collect()),
        }
    }
}

impl FuchsianSeed {
    /// Validates determinants, the relator and hyperbolicity of short words.
    /// Discreteness is not checked.
    pub fn new(genus: usize, generators: Vec<Matrix2<f64>>) -> Result<Self> {
        let presentation = Presentation::new(genus)?;
        if generators.len() != presentation.generator_count() {
            return Err(FlagError::InvalidSeed(format!(
                "expected {} generators, got {}",
                presentation.generator_count(),
                generators.len()
            )));
        }
        for (i, m) in generators.iter().enumerate() {
            let det = m.determinant();
            if (det - 1.0).abs() > tolerance::UNIMODULAR || !det.is_finite() {
                return Err(FlagError::InvalidSeed(format!("{} has determinant {det}", generator_name(i))));
            }
        }
        let inverses = generators.iter().map(inverse2).collect();
        let seed = Self { presentation, generators, inverses };
        let residual = seed.relator_residual();
        if !(residual <= tolerance::RELATOR) {
            return Err(FlagError::RelatorResidual { residual, bound: tolerance::RELATOR });
        }
        for (w, m) in seed.ball(4) {
            if !w.is_empty() && m.trace().abs() <= 2.0 + tolerance::HYPERBOLIC {
                return Err(FlagError::InvalidSeed(format!("word {w} is not hyperbolic")));
            }
        }
        Ok(seed)
    }

    pub fn genus(&self) -> usize {
        self.presentation.genus
    }

    pub fn presentation(&self) -> Presentation {
        self.presentation
    }

    pub fn generators(&self) -> &[Matrix2<f64>] {
        &self.generators
    }

    pub fn letter(&self, l: Letter) -> &Matrix2<f64> {
        if l.is_inverse() {
            &self.inverses[l.generator()]
        } else {
            &self.generators[l.generator()]
        }
    }

    pub fn image(&self, w: &Word) -> Matrix2<f64> {
        w.letters().iter().fold(Matrix2::identity(), |acc, l| acc * self.letter(*l))
    }

    /// `min ||R - I||, ||R + I||` (Frobenius) for the relator image `R`.
    pub fn relator_residual(&self) -> f64 {
        let r = self.image(&self.presentation.relator());
        let id = Matrix2::identity();
        (r - id).norm().min((r + id).norm())
    }

    pub fn ball(&self, radius: usize) -> BallIter<'_> {
        enumerate_ball(self, radius)
    }
}

/// Regular hyperbolic 4g-gon with vertex angle 2pi/4g and the side pairing
/// `a_j: s_{4j+2} -> s_{4j}`, `b_j: s_{4j+1} -> s_{4j+3}`, in the upper half
/// plane model.
pub fn standard_fuchsian(genus: usize) -> Result<FuchsianSeed> {
    Presentation::new(genus)?;
    let n = (4 * genus) as f64;
    // distance from the center to a side midpoint
    let rho = (1.0 / (PI / n).tan()).acosh();
    let translate = Matrix2::new(rho.exp(), 0.0, 0.0, (-rho).exp());
    let rot = |theta: f64| {
        let (s, c) = (theta / 2.0).sin_cos();
        Matrix2::new(c, -s, s, c)
    };
    let side = |k: usize| 2.0 * PI * k as f64 / n;
    let pair = |from: usize, to: usize| rot(side(to)) * translate * rot(PI - side(from));
    let mut gens = Vec::with_capacity(2 * genus);
    for j in 0..genus {
        gens.push(pair(4 * j + 2, 4 * j));
        gens.push(pair(4 * j + 1, 4 * j + 3));
    }
    FuchsianSeed::new(genus, gens)
}

/// `1 + 4g((4g-1)^r - 1)/(4g-2)`.
pub fn ball_size(genus: usize, radius: usize) -> usize {
    let k = 4 * genus;
    let mut total = 1usize;
    let mut layer = 1usize;
    for i in 0..radius {
        layer = if i == 0 { k } else { layer * (k - 1) };
        total += layer;
    }
    total
}

/// Shortlex stream of all freely reduced words of length <= radius with
/// their SL(2,R) images. Holds one length layer in memory.
pub struct BallIter<'a> {
    seed: &'a FuchsianSeed,
    radius: usize,
    layer: Vec<(Word, Matrix2<f64>)>,
    pos: usize,
    length: usize,
}

pub fn enumerate_ball(seed: &FuchsianSeed, radius: usize) -> BallIter<'_> {
    BallIter { seed, radius, layer: vec![(Word::empty(), Matrix2::identity())], pos: 0, length: 0 }
}

impl Iterator for BallIter<'_> {
    type Item = (Word, Matrix2<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos == self.layer.len() {
            if self.length == self.radius {
                return None;
            }
            let letters = self.seed.presentation.letter_count();
            let mut next = Vec::with_capacity(self.layer.len() * (letters - 1));
            for (w, m) in &self.layer {
                let last = w.letters().last().copied();
                for code in 0..letters {
                    let l = Letter::from_code(code);
                    if last == Some(l.inverse()) {
                        continue;
                    }
                    next.push((w.push(l), m * self.seed.letter(l)));
                }
            }
            self.layer = next;
            self.pos = 0;
            self.length += 1;
        }
        let item = self.layer[self.pos].clone();
        self.pos += 1;
        Some(item)
    }
}

/// Rounded-entry key identifying SL(2,R) matrices at `resolution`.
pub fn fingerprint(m: &Matrix2<f64>, resolution: f64) -> [i64; 4] {
    let q = |x: f64| (x / resolution).round() as i64;
    [q(m[(0, 0)]), q(m[(0, 1)]), q(m[(1, 0)]), q(m[(1, 1)])]
}

/// Ball enumeration keeping only the first word of each fingerprint class.
pub fn enumerate_ball_dedup(seed: &FuchsianSeed, radius: usize, resolution: f64) -> Vec<(Word, Matrix2<f64>)> {
    let mut seen = HashSet::new();
    enumerate_ball(seed, radius).filter(|(_, m)| seen.insert(fingerprint(m, resolution))).collect()
}

/// A morphism from the surface group to R, given on generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologyClass {
    values: Vec<f64>,
}

impl CohomologyClass {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FlagError::InvalidSpec("cohomology class has non-finite value".into()));
        }
        Ok(Self { values })
    }

    pub fn zero(genus: usize) -> Self {
        Self { values: vec![0.0; 2 * genus] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn letter(&self, l: Letter) -> f64 {
        let v = self.values[l.generator()];
        if l.is_inverse() {
            -v
        } else {
            v
        }
    }
}

pub fn eval_u(u: &CohomologyClass, w: &Word) -> f64 {
    w.letters().iter().map(|l| u.letter(*l)).sum()
}

/// `2 log r` for the spectral radius `r` of a hyperbolic matrix.
pub fn translation_length(m: &Matrix2<f64>) -> Result<f64> {
    let tr = m.trace().abs();
    if !(tr > 2.0 + tolerance::HYPERBOLIC) {
        return Err(FlagError::NotHyperbolic { trace: tr });
    }
    let half = tr / 2.0;
    Ok(2.0 * (half + (half * half - 1.0).sqrt()).ln())
}

/// Attractive eigendirection of a hyperbolic matrix as an angle in `[0, pi)`.
pub fn attractive_direction(m: &Matrix2<f64>) -> Result<f64> {
    let tr = m.trace();
    if !(tr.abs() > 2.0 + tolerance::HYPERBOLIC) {
        return Err(FlagError::NotHyperbolic { trace: tr.abs() });
    }
    let disc = (tr * tr / 4.0 - 1.0).sqrt();
    let lambda = tr / 2.0 + tr.signum() * disc;
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    // two null vectors of m - lambda; keep the better conditioned one
    let v1 = (b, lambda - a);
    let v2 = (lambda - d, c);
    let (x, y) = if v1.0.hypot(v1.1) >= v2.0.hypot(v2.1) { v1 } else { v2 };
    let mut theta = y.atan2(x);
    if theta < 0.0 {
        theta += PI;
    }
    if theta >= PI {
        theta -= PI;
    }
    Ok(theta)
}
