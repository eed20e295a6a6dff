//! Batch manifests: parsing and validate-everything-first checks.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use hudsal::{IttiParams, Region, RgbImage};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::report::SCHEMA_VERSION;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    /// Relative to the manifest's directory.
    pub output_dir: PathBuf,
    #[serde(default)]
    pub dump_maps: bool,
    /// Saliency parameter overrides; missing fields keep their defaults.
    #[serde(default)]
    pub params: Option<IttiParams>,
    pub cases: Vec<ManifestCase>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestCase {
    pub id: String,
    pub measured: PathBuf,
    pub hud: PathBuf,
    pub region: Region,
    pub content_group: String,
}

/// A case whose inputs are loaded and checked.
#[derive(Debug, Clone)]
pub struct PlannedCase {
    pub id: String,
    pub measured: RgbImage,
    pub hud: RgbImage,
    pub region: Region,
    pub content_group: String,
}

/// A fully validated batch, ready to run.
#[derive(Debug, Clone)]
pub struct Plan {
    pub output_dir: PathBuf,
    pub dump_maps: bool,
    pub params: IttiParams,
    pub cases: Vec<PlannedCase>,
}

/// Ids become directory names, so they are restricted to a portable set.
pub fn validate_id(id: &str) -> CliResult<()> {
    let ok = !id.is_empty()
        && id != "."
        && id != ".."
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'));
    if ok {
        Ok(())
    } else {
        Err(CliError::validation(format!(
            "case id {id:?} must be non-empty and use only letters, digits, '-', '_' or '.'"
        )))
    }
}

pub fn parse(text: &str) -> CliResult<Manifest> {
    let manifest: Manifest = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("invalid manifest: {e}")))?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(CliError::validation(format!(
            "unsupported manifest schema_version {} (expected {SCHEMA_VERSION})",
            manifest.schema_version
        )));
    }
    Ok(manifest)
}

/// Reads, parses and validates a manifest, loading every referenced image.
///
/// Nothing is computed unless every case passes: ids unique and well formed,
/// files present and decodable, regions non-empty and inside the measured
/// image, and both images large enough for the saliency parameters.
pub fn prepare(path: &Path, out_override: Option<&Path>) -> CliResult<Plan> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let msg = format!("cannot read manifest {}: {e}", path.display());
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Validation(msg)
        } else {
            CliError::Runtime(anyhow::anyhow!(msg))
        }
    })?;
    let manifest = parse(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    resolve(manifest, base, out_override)
}

pub fn resolve(manifest: Manifest, base: &Path, out_override: Option<&Path>) -> CliResult<Plan> {
    let params = manifest.params.unwrap_or_default();
    params
        .validate()
        .map_err(|e| CliError::validation(format!("manifest params: {e}")))?;
    let min = params.min_input_size();

    let mut seen = HashSet::new();
    for c in &manifest.cases {
        validate_id(&c.id)?;
        if !seen.insert(c.id.as_str()) {
            return Err(CliError::validation(format!(
                "duplicate case id {:?}",
                c.id
            )));
        }
    }
    for c in &manifest.cases {
        if c.region.w == 0 || c.region.h == 0 {
            return Err(CliError::validation(format!(
                "case {:?}: region {} has zero {}",
                c.id,
                c.region,
                if c.region.w == 0 { "width" } else { "height" }
            )));
        }
        for (field, p) in [("measured", &c.measured), ("hud", &c.hud)] {
            let full = base.join(p);
            if !full.is_file() {
                return Err(CliError::validation(format!(
                    "case {:?}: {field} file {} does not exist",
                    c.id,
                    full.display()
                )));
            }
        }
    }

    let mut cases = Vec::with_capacity(manifest.cases.len());
    for c in manifest.cases {
        let load = |field: &str, p: &Path| {
            hudsal::load_png(base.join(p))
                .map_err(|e| CliError::core(format!("case {:?}: {field}", c.id), e))
        };
        let measured = load("measured", &c.measured)?;
        let hud = load("hud", &c.hud)?;
        c.region
            .validate_within(measured.width(), measured.height())
            .map_err(|e| CliError::validation(format!("case {:?}: {e}", c.id)))?;
        for (field, img) in [("measured", &measured), ("hud", &hud)] {
            if img.width() < min || img.height() < min {
                return Err(CliError::validation(format!(
                    "case {:?}: {field} image is {}x{}, minimum input size is {min}x{min}",
                    c.id,
                    img.width(),
                    img.height()
                )));
            }
        }
        cases.push(PlannedCase {
            id: c.id,
            measured,
            hud,
            region: c.region,
            content_group: c.content_group,
        });
    }

    Ok(Plan {
        output_dir: out_override
            .map(Path::to_path_buf)
            .unwrap_or_else(|| base.join(&manifest.output_dir)),
        dump_maps: manifest.dump_maps,
        params,
        cases,
    })
}
