//! Scenario configuration: one JSON file per scenario, parsed strictly and
//! validated with field paths in every error.

use std::path::Path;

use serde::de::{self, DeserializeOwned};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use zstab_core::fem2d::RegionMap2D;
use zstab_core::oracle::PulseLayout;
use zstab_core::{FieldProfile, Material, Mesh1D, Mesh2D, Scheme};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeChoice {
    Galerkin,
    Averaged,
    Both,
}

impl SchemeChoice {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeChoice::Galerkin => vec![Scheme::Galerkin],
            SchemeChoice::Averaged => vec![Scheme::ElementAveraged],
            SchemeChoice::Both => Scheme::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    /// Conductivity, S/m.
    pub sigma: f64,
    /// Relative permeability; `mu = mu_r * mu_0` when `mu_0` is true,
    /// otherwise `mu = mu_r` in normalized units.
    pub mu_r: f64,
    #[serde(default)]
    pub mu_0: bool,
}

impl MaterialConfig {
    pub fn mu(&self) -> f64 {
        if self.mu_0 {
            self.mu_r * zstab_core::MU_0
        } else {
            self.mu_r
        }
    }
}

/// Uniform 1D line `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineMesh {
    pub dz: f64,
    pub length: f64,
}

/// Conducting sheet centred on `y = 0` in graded air.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheetMesh {
    pub dz: f64,
    pub z0: f64,
    pub length: f64,
    pub thickness: f64,
    pub conductor_rows: usize,
    pub air: f64,
    pub air_rows: usize,
    pub grading: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeshConfig {
    Line(LineMesh),
    Sheet(SheetMesh),
}

/// Internally tagged enums buffer their content, which loses the position
/// of an error inside the variant; the variant is decoded from a map here and
/// the inner path travels in the message as `@path: message`.
fn decode_variant<T: DeserializeOwned, E: de::Error>(obj: Map<String, Value>) -> Result<T, E> {
    serde_path_to_error::deserialize(Value::Object(obj))
        .map_err(|e| E::custom(format!("@{}: {}", e.path(), e.inner())))
}

fn take_kind<E: de::Error>(obj: &mut Map<String, Value>) -> Result<String, E> {
    match obj.remove("kind") {
        Some(Value::String(k)) => Ok(k),
        Some(other) => Err(E::custom(format!("@kind: expected a string, got {other}"))),
        None => Err(E::custom("@kind: missing field `kind`")),
    }
}

impl<'de> Deserialize<'de> for MeshConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut obj = Map::deserialize(d)?;
        match take_kind::<D::Error>(&mut obj)?.as_str() {
            "line" => Ok(MeshConfig::Line(decode_variant(obj)?)),
            "sheet" => Ok(MeshConfig::Sheet(decode_variant(obj)?)),
            k => Err(de::Error::custom(format!(
                "@kind: unknown mesh kind `{k}`, expected line or sheet"
            ))),
        }
    }
}

impl MeshConfig {
    pub fn dz(&self) -> f64 {
        match *self {
            MeshConfig::Line(LineMesh { dz, .. }) | MeshConfig::Sheet(SheetMesh { dz, .. }) => dz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectPulse {
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothCircle {
    pub radius: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum ProfileConfig {
    /// Field on `a <= z <= b`.
    #[serde(rename = "rect_pulse_1d")]
    RectPulse1d(RectPulse),
    /// Field on `|z| <= a`, `|y| <= b`.
    #[serde(rename = "rect_pulse_2d")]
    RectPulse2d(RectPulse),
    #[serde(rename = "smooth_circle_2d")]
    SmoothCircle2d(SmoothCircle),
}

impl<'de> Deserialize<'de> for ProfileConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut obj = Map::deserialize(d)?;
        match take_kind::<D::Error>(&mut obj)?.as_str() {
            "rect_pulse_1d" => Ok(ProfileConfig::RectPulse1d(decode_variant(obj)?)),
            "rect_pulse_2d" => Ok(ProfileConfig::RectPulse2d(decode_variant(obj)?)),
            "smooth_circle_2d" => Ok(ProfileConfig::SmoothCircle2d(decode_variant(obj)?)),
            k => Err(de::Error::custom(format!(
                "@kind: unknown profile kind `{k}`, expected rect_pulse_1d, rect_pulse_2d or smooth_circle_2d"
            ))),
        }
    }
}

impl ProfileConfig {
    pub fn profile(self) -> FieldProfile {
        match self {
            ProfileConfig::RectPulse1d(RectPulse { a, b, amplitude }) => {
                FieldProfile::RectPulse1D { a, b, amplitude }
            }
            ProfileConfig::RectPulse2d(RectPulse { a, b, amplitude }) => {
                FieldProfile::RectPulse2D { a, b, amplitude }
            }
            ProfileConfig::SmoothCircle2d(SmoothCircle { radius, amplitude }) => {
                FieldProfile::SmoothCircle2D { radius, amplitude }
            }
        }
    }

    fn dimension(self) -> u8 {
        match self {
            ProfileConfig::RectPulse1d(_) => 1,
            _ => 2,
        }
    }
}

/// Log-spaced Peclet sweep over a pulse laid out on whole elements of
/// length `mesh.dz`; the amplitude comes from the profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub pe_min: f64,
    pub pe_max: f64,
    pub points: usize,
    /// Extra Peclet numbers merged into the grid.
    #[serde(default)]
    pub include: Vec<f64>,
    pub m_b: usize,
    pub m_c: usize,
    pub m_d: usize,
}

impl SweepConfig {
    pub fn layout(&self) -> CliResult<PulseLayout> {
        PulseLayout::new(self.m_b, self.m_c, self.m_d).map_err(|e| CliError::config("sweep", e.to_string()))
    }

    /// Sorted, de-duplicated sweep grid.
    pub fn grid(&self) -> Vec<f64> {
        let mut pe: Vec<f64> = if self.points == 1 {
            vec![self.pe_min]
        } else {
            let (lo, hi) = (self.pe_min.ln(), self.pe_max.ln());
            (0..self.points)
                .map(|k| (lo + (hi - lo) * k as f64 / (self.points - 1) as f64).exp())
                .collect()
        };
        pe.extend(self.include.iter().copied());
        pe.sort_by(f64::total_cmp);
        pe.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        pe
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub svg: bool,
    /// Also write the full nodal field of every 2D solve.
    #[serde(default = "yes")]
    pub field_csv: bool,
    /// Largest z refinement used for a 2D reference solve; Peclet numbers
    /// needing more are reported without a reference deviation.
    #[serde(default = "default_reference_factor")]
    pub max_reference_factor: usize,
}

fn yes() -> bool {
    true
}

fn default_reference_factor() -> usize {
    8
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            svg: false,
            field_csv: true,
            max_reference_factor: default_reference_factor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Free text; the shipped configs use it to mark artifact choices.
    #[serde(default)]
    pub note: String,
    pub dimension: u8,
    #[serde(default = "both")]
    pub scheme: SchemeChoice,
    /// Runs are given either as Peclet numbers ...
    #[serde(default)]
    pub pe: Option<Vec<f64>>,
    /// ... or as velocities (m/s) combined with the material and `dz`.
    #[serde(default)]
    pub velocity: Option<Vec<f64>>,
    pub material: MaterialConfig,
    pub mesh: MeshConfig,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn both() -> SchemeChoice {
    SchemeChoice::Both
}

fn positive(path: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(
            path,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg = Self::parse(&text)?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let outer = e.path().to_string();
            let message = e.into_inner().to_string();
            let (path, message) = match message.strip_prefix('@').and_then(|m| m.split_once(": ")) {
                Some((".", m)) => (outer, m.to_string()),
                Some((inner, m)) => (format!("{outer}.{inner}"), m.to_string()),
                None => (outer, message),
            };
            CliError::config(if path == "." { "(root)" } else { &path }, message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(CliError::config("dimension", "must be 1 or 2"));
        }
        match (&self.mesh, self.dimension) {
            (MeshConfig::Line(LineMesh { dz, length }), 1) => {
                positive("mesh.dz", *dz)?;
                positive("mesh.length", *length)?;
            }
            (MeshConfig::Sheet(_), 2) => {}
            _ => return Err(CliError::config("mesh.kind", "does not match the dimension")),
        }
        if self.profile.dimension() != self.dimension {
            return Err(CliError::config("profile.kind", "does not match the dimension"));
        }
        if !self.profile.profile().amplitude().is_finite() {
            return Err(CliError::config("profile.amplitude", "must be finite"));
        }
        self.profile
            .profile()
            .validate()
            .map_err(|e| CliError::config("profile", e.to_string()))?;
        positive("material.sigma", self.material.sigma)?;
        positive("material.mu_r", self.material.mu_r)?;
        match (&self.pe, &self.velocity) {
            (Some(_), Some(_)) => return Err(CliError::config("pe", "give either pe or velocity, not both")),
            (None, None) if self.sweep.is_none() => {
                return Err(CliError::config("pe", "missing: give pe or velocity"))
            }
            (Some(list), None) | (None, Some(list)) => {
                let key = if self.pe.is_some() { "pe" } else { "velocity" };
                if list.is_empty() {
                    return Err(CliError::config(key, "list is empty"));
                }
                for (i, v) in list.iter().enumerate() {
                    if !(*v >= 0.0 && v.is_finite()) {
                        return Err(CliError::config(
                            &format!("{key}[{i}]"),
                            format!("must be non-negative, got {v}"),
                        ));
                    }
                }
            }
            (None, None) => {}
        }
        if let Some(s) = &self.sweep {
            positive("sweep.pe_min", s.pe_min)?;
            positive("sweep.pe_max", s.pe_max)?;
            if s.pe_max < s.pe_min {
                return Err(CliError::config("sweep.pe_max", "must not be below pe_min"));
            }
            if s.points == 0 {
                return Err(CliError::config("sweep.points", "must be at least 1"));
            }
            for (i, v) in s.include.iter().enumerate() {
                positive(&format!("sweep.include[{i}]"), *v)?;
            }
            s.layout()?;
        }
        if self.dimension == 2 {
            self.sheet()?;
        }
        Ok(())
    }

    /// Canonical compact JSON of the parsed config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn schemes(&self, cli: Option<SchemeChoice>) -> Vec<Scheme> {
        cli.unwrap_or(self.scheme).schemes()
    }

    /// Peclet numbers of the runs, in config order.
    pub fn peclet_list(&self) -> CliResult<Vec<f64>> {
        let dz = self.mesh.dz();
        match (&self.pe, &self.velocity) {
            (Some(pe), _) => Ok(pe.clone()),
            (None, Some(v)) => Ok(v
                .iter()
                .map(|u| 0.5 * self.material.mu() * self.material.sigma * u * dz)
                .collect()),
            (None, None) => Err(CliError::config("pe", "missing: give pe or velocity")),
        }
    }

    pub fn material_for(&self, pe: f64) -> CliResult<Material> {
        Material::for_peclet(pe, self.mesh.dz(), self.material.sigma, self.material.mu())
            .map_err(|e| CliError::config("pe", e.to_string()))
    }

    pub fn line(&self) -> CliResult<Mesh1D> {
        match self.mesh {
            MeshConfig::Line(LineMesh { dz, length }) => {
                Mesh1D::from_length(length, dz).map_err(|e| CliError::config("mesh", e.to_string()))
            }
            _ => Err(CliError::config("mesh.kind", "a 1D run needs a line mesh")),
        }
    }

    pub fn sheet(&self) -> CliResult<(Mesh2D, RegionMap2D)> {
        match self.mesh {
            MeshConfig::Sheet(SheetMesh {
                dz,
                z0,
                length,
                thickness,
                conductor_rows,
                air,
                air_rows,
                grading,
            }) => {
                positive("mesh.dz", dz)?;
                positive("mesh.length", length)?;
                let nz = (length / dz).round() as usize + 1;
                if nz < 3 {
                    return Err(CliError::config("mesh.length", "needs at least two elements"));
                }
                let mesh = Mesh2D::sheet(nz, dz, z0, thickness, conductor_rows, air, air_rows, grading)
                    .map_err(|e| CliError::config("mesh", e.to_string()))?;
                let regions = RegionMap2D::sheet(&mesh, thickness)
                    .map_err(|e| CliError::config("mesh", e.to_string()))?;
                Ok((mesh, regions))
            }
            _ => Err(CliError::config("mesh.kind", "a 2D run needs a sheet mesh")),
        }
    }
}
