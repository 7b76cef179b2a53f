//! Run configuration: one JSON file, optionally pointing at a separate
//! representation or seed file.

use std::fs;
use std::path::{Path, PathBuf};

use flagcurve_core::projective::{Flag, ProjLine, ProjPoint};
use flagcurve_core::representation::{RepSpec, RepSpecJson};
use flagcurve_core::tolerance::Tolerances;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MIN_RADIUS: usize = 2;
pub const MAX_RADIUS: usize = 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub rep_spec: RepSpecJson,
    #[serde(default = "default_radius")]
    pub ball_radius: usize,
    #[serde(default = "default_min_length")]
    pub min_translation_length: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub render: RenderConfig,
    #[serde(default)]
    pub orbit: OrbitConfig,
}

fn default_radius() -> usize {
    6
}

fn default_min_length() -> f64 {
    flagcurve_core::limit_curve::DEFAULT_MIN_LENGTH
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Affine,
    Dual,
    Both,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub chart: Chart,
    pub width_px: u32,
    pub stroke: f64,
    /// Half-width of the clipping window in chart coordinates.
    pub window: f64,
    /// Covector whose level set 1 is the affine chart.
    pub chart_covector: [f64; 3],
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self { chart: Chart::Both, width_px: 640, stroke: 1.5, window: 3.0, chart_covector: [1.0, 1.0, 1.0] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseFlag {
    pub point: [f64; 3],
    pub line: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitConfig {
    pub base: BaseFlag,
    pub nbhd: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self { base: BaseFlag { point: [1.0, 1.0, 0.0], line: [1.0, -1.0, 0.0] }, nbhd: 0.05 }
    }
}

/// A validated configuration with everything it references resolved.
pub struct Loaded {
    pub config: RunConfig,
    pub spec: RepSpec,
    /// The configuration as run, defaults filled in and files inlined.
    pub echo: Value,
    pub input_hash: String,
}

impl Loaded {
    pub fn base_flag(&self) -> Result<Flag, CliError> {
        let b = &self.config.orbit.base;
        let bad = |e: flagcurve_core::FlagError| CliError::field("orbit.base", e);
        let p = ProjPoint::from_coords(b.point[0], b.point[1], b.point[2]).map_err(bad)?;
        let l = ProjLine::from_coords(b.line[0], b.line[1], b.line[2]).map_err(bad)?;
        Flag::new(p, l, self.config.tolerances.user_incidence).map_err(bad)
    }
}

fn read_json(path: &Path, field: &str) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::field(field, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::field(field, format!("{}: {e}", path.display())))
}

/// Replaces a string at `obj[key]` by the JSON document it names, relative
/// to `dir`.
fn inline_file(obj: &mut Value, key: &str, dir: &Path, field: &str) -> Result<(), CliError> {
    if let Some(Value::String(rel)) = obj.get(key) {
        let doc = read_json(&dir.join(rel), field)?;
        obj[key] = doc;
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut raw: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if !raw.is_object() {
        return Err(CliError::Config("top level must be an object".into()));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    inline_file(&mut raw, "rep_spec", dir, "rep_spec")?;
    if let Some(rep) = raw.get_mut("rep_spec") {
        inline_file(rep, "seed", dir, "rep_spec.seed")?;
    }
    let config: RunConfig = serde_json::from_value(raw).map_err(|e| CliError::Config(e.to_string()))?;
    validate(&config)?;
    let spec = RepSpec::try_from(config.rep_spec.clone()).map_err(|e| CliError::field("rep_spec", e))?;
    let echo = serde_json::to_value(&config).map_err(|e| CliError::Config(e.to_string()))?;
    let canonical = serde_json::to_string(&echo).map_err(|e| CliError::Config(e.to_string()))?;
    let digest = Sha256::digest(canonical.as_bytes());
    let input_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded { config, spec, echo, input_hash })
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::field(field, format!("must be positive, got {v}")))
    }
}

fn validate(c: &RunConfig) -> Result<(), CliError> {
    if !(MIN_RADIUS..=MAX_RADIUS).contains(&c.ball_radius) {
        return Err(CliError::field(
            "ball_radius",
            format!("must be in [{MIN_RADIUS}, {MAX_RADIUS}], got {}", c.ball_radius),
        ));
    }
    if !(c.min_translation_length.is_finite() && c.min_translation_length >= 0.0) {
        return Err(CliError::field("min_translation_length", "must be finite and non-negative"));
    }
    if let Some(name) = c.tolerances.first_invalid() {
        return Err(CliError::field(&format!("tolerances.{name}"), "must be positive"));
    }
    if c.render.width_px < 16 {
        return Err(CliError::field("render.width_px", "must be at least 16"));
    }
    positive("render.stroke", c.render.stroke)?;
    positive("render.window", c.render.window)?;
    let cv = c.render.chart_covector;
    if !cv.iter().all(|x| x.is_finite()) || cv.iter().all(|x| *x == 0.0) {
        return Err(CliError::field("render.chart_covector", "must be a finite nonzero vector"));
    }
    positive("orbit.nbhd", c.orbit.nbhd)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn scratch(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("flagcurve-config-{tag}-{}", std::process::id()));
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn defaults_fill_in() {
        let d = scratch("defaults");
        let p = write(&d, "c.json", r#"{"rep_spec": {"variant": "canonical", "seed": {"genus": 2}}}"#);
        let l = load(&p).unwrap();
        assert_eq!(l.config.ball_radius, 6);
        assert_eq!(l.echo["min_translation_length"], 0.5);
        assert!(l.echo.get("output_dir").is_none());
        assert_eq!(l.input_hash.len(), 64);
    }

    #[test]
    fn seed_and_spec_files_are_inlined() {
        let d = scratch("inline");
        write(&d, "seed.json", r#"{"genus": 2}"#);
        write(&d, "rep.json", r#"{"variant": "linear_u", "seed": "seed.json", "u": {"a1": 0.1}}"#);
        let p = write(&d, "c.json", r#"{"rep_spec": "rep.json", "ball_radius": 3}"#);
        let l = load(&p).unwrap();
        assert_eq!(l.echo["rep_spec"]["seed"]["genus"], 2);
        assert_eq!(l.spec.variant_name(), "linear_u");
    }

    #[test]
    fn errors_name_the_field() {
        let d = scratch("errors");
        let cases = [
            (r#"{"rep_spec": {"variant": "canonical", "seed": "nope.json"}}"#, "rep_spec.seed"),
            (r#"{"rep_spec": {"variant": "canonical", "seed": {"genus": 2}}, "ball_radius": 13}"#, "ball_radius"),
            (r#"{"rep_spec": {"variant": "canonical", "seed": {"genus": 2}}, "tolerances": {"dedup": 0}}"#, "tolerances.dedup"),
            (r#"{"rep_spec": {"variant": "canonical", "seed": {"genus": 2}}, "colour": 1}"#, "colour"),
            (r#"{"ball_radius": 4}"#, "rep_spec"),
            (r#"{"rep_spec": {"variant": "spiral", "seed": {"genus": 2}}}"#, "rep_spec"),
        ];
        for (i, (body, field)) in cases.iter().enumerate() {
            let p = write(&d, &format!("c{i}.json"), body);
            let err = load(&p).err().unwrap();
            assert!(matches!(err, CliError::Config(_)), "{body}");
            assert!(err.to_string().contains(field), "{body}: {err}");
        }
    }
}
