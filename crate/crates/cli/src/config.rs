//! Instance configuration files.
//!
//! A single TOML document describes the density, the allocation set (vertex
//! rows plus a `deterministic` flag), the menu shape with initial prices,
//! and the solver knobs. Presets are the same structure built in code; a
//! target argument is either `preset:NAME` or a path to such a file.

use auction_core::{presets::Preset, AllocationSet, DensitySpec, Error};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub density: DensityConfig,
    pub allocation: AllocationConfig,
    pub menu: MenuConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub kind: String,
    #[serde(default)]
    pub bounds: Option<Vec<f64>>,
    #[serde(default)]
    pub rates: Option<Vec<f64>>,
    #[serde(default)]
    pub truncation: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationConfig {
    pub vertices: Vec<Vec<f64>>,
    /// Deterministic means the feasible set is exactly the vertex list; the
    /// default takes the convex hull.
    #[serde(default)]
    pub deterministic: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuConfig {
    pub shape: Vec<Vec<f64>>,
    pub initial_prices: Vec<f64>,
    #[serde(default = "default_true")]
    pub include_zero_option: bool,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub calibration_resolutions: Option<[usize; 2]>,
    pub certify_resolutions: Option<Vec<usize>>,
    pub certify_tol_rel: Option<f64>,
    pub seed: Option<u64>,
}

fn default_true() -> bool {
    true
}

pub struct LoadedInstance {
    pub preset: Preset,
    pub seed: u64,
}

/// Resolves `preset:NAME` or a config file path.
pub fn load_target(target: &str) -> Result<LoadedInstance, Error> {
    if let Some(name) = target.strip_prefix("preset:") {
        return Ok(LoadedInstance {
            preset: auction_core::presets::by_name(name)?,
            seed: 7,
        });
    }
    let text = std::fs::read_to_string(target)
        .map_err(|e| Error::Input(format!("cannot read config {target:?}: {e}")))?;
    let cfg: InstanceConfig =
        toml::from_str(&text).map_err(|e| Error::Input(format!("bad config {target:?}: {e}")))?;
    instance_from_config(target, cfg)
}

fn instance_from_config(name: &str, cfg: InstanceConfig) -> Result<LoadedInstance, Error> {
    let density = match cfg.density.kind.as_str() {
        "uniform_box" => DensitySpec::UniformBox {
            bounds: cfg
                .density
                .bounds
                .ok_or_else(|| Error::Input("uniform_box needs `bounds`".into()))?,
        },
        "exponential_product" => DensitySpec::ExponentialProduct {
            rates: cfg
                .density
                .rates
                .ok_or_else(|| Error::Input("exponential_product needs `rates`".into()))?,
            truncation: cfg
                .density
                .truncation
                .ok_or_else(|| Error::Input("exponential_product needs `truncation`".into()))?,
        },
        other => {
            return Err(Error::Input(format!(
                "unsupported density kind {other:?} (uniform_box, exponential_product)"
            )))
        }
    };
    let alloc = AllocationSet::new(cfg.allocation.vertices, !cfg.allocation.deterministic)?;
    if alloc.dimension() != density.dimension() {
        return Err(Error::Input(
            "allocation set and density must share one dimension".into(),
        ));
    }
    if cfg.menu.shape.len() != cfg.menu.initial_prices.len() {
        return Err(Error::Input(
            "menu.shape and menu.initial_prices must have matching lengths".into(),
        ));
    }
    let calibration = cfg.solver.calibration_resolutions.unwrap_or([64, 128]);
    let certify = cfg
        .solver
        .certify_resolutions
        .unwrap_or_else(|| vec![32, 64, 128]);
    if certify.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("certify_resolutions must be ascending".into()));
    }
    let tol = cfg.solver.certify_tol_rel.unwrap_or(0.02);
    if !(tol > 0.0) {
        return Err(Error::Input("certify_tol_rel must be positive".into()));
    }
    Ok(LoadedInstance {
        preset: Preset {
            name: name.to_string(),
            description: format!("instance from {name}"),
            density,
            alloc,
            menu_shape: cfg.menu.shape,
            initial_prices: cfg.menu.initial_prices,
            include_zero_option: cfg.menu.include_zero_option,
            calibration_resolutions: (calibration[0], calibration[1]),
            certify_resolutions: certify,
            certify_tol_rel: tol,
            randomized_benchmark_price: None,
        },
        seed: cfg.solver.seed.unwrap_or(7),
    })
}
