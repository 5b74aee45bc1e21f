use serde::{Deserialize, Serialize};

/// Tunable constants of the symbolic world. Every field has a default, so a
/// config file (or a manifest's `[config]` table) only lists overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// °C
    pub cook_threshold: f64,
    /// °C
    pub burn_threshold: f64,
    /// °C
    pub freeze_threshold: f64,
    /// °C
    pub ambient_temperature: f64,
    /// °C reached asymptotically by objects on or in a toggled-on heat source.
    pub heat_source_temperature: f64,
    /// First-order heat exchange rate, 1/s.
    pub heat_rate: f64,
    /// Wetness gained per second inside a running water source.
    pub wetting_rate: f64,
    pub soaked_cutoff: f64,
    pub dusty_cutoff: f64,
    pub stained_cutoff: f64,
    /// m
    pub reach_radius: f64,
    /// `nextto` radius of an object is this multiple of its bounding radius.
    pub nextto_scale: f64,
    /// m, for objects spawned without an explicit size.
    pub default_object_radius: f64,
    /// Margin above the cook/burn threshold used when realizing `cooked`/`burnt`.
    pub realization_margin: f64,
    pub durations: PrimitiveDurations,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            cook_threshold: 70.0,
            burn_threshold: 200.0,
            freeze_threshold: 0.0,
            ambient_temperature: 22.0,
            heat_source_temperature: 200.0,
            heat_rate: 0.05,
            wetting_rate: 0.1,
            soaked_cutoff: 0.5,
            dusty_cutoff: 0.5,
            stained_cutoff: 0.5,
            reach_radius: 1.5,
            nextto_scale: 2.0,
            default_object_radius: 0.1,
            realization_margin: 10.0,
            durations: PrimitiveDurations::default(),
        }
    }
}

/// Simulated seconds consumed by each primitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrimitiveDurations {
    pub navigate: f64,
    pub grasp: f64,
    pub place: f64,
    pub open: f64,
    pub close: f64,
    pub toggle: f64,
    pub slice: f64,
    pub wipe: f64,
}

impl Default for PrimitiveDurations {
    fn default() -> Self {
        PrimitiveDurations {
            navigate: 5.0,
            grasp: 2.0,
            place: 2.0,
            open: 2.0,
            close: 2.0,
            toggle: 2.0,
            slice: 2.0,
            wipe: 3.0,
        }
    }
}

pub const CONFIG_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    config_version: u32,
    #[serde(default)]
    world: WorldConfig,
}

impl WorldConfig {
    /// Parses a standalone thresholds file: `config_version = 1` plus an optional `[world]` table.
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| e.to_string())?;
        if file.config_version != CONFIG_VERSION {
            return Err(format!(
                "unsupported config_version {} (expected {CONFIG_VERSION})",
                file.config_version
            ));
        }
        Ok(file.world)
    }
}
