//! Scene manifests: rooms, free space and fixed furniture in TOML.

use serde::{Deserialize, Serialize};

use super::config::WorldConfig;
use super::state::{AgentState, Aabb, ObjectId, ObjectInstance, Pose, SceneState, Vec3};
use super::WorldError;
use crate::syntax::{CategoryName, RoomName};
use crate::taxonomy::Taxonomy;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub manifest_version: u32,
    pub name: String,
    #[serde(default)]
    pub agent: Pose,
    #[serde(default)]
    pub room: Vec<RoomSpec>,
    #[serde(default)]
    pub fixed_object: Vec<FixedObjectSpec>,
    #[serde(default)]
    pub config: WorldConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSpec {
    pub name: RoomName,
    pub min: Vec3,
    pub max: Vec3,
    /// Floor regions where new objects may be spawned.
    #[serde(default)]
    pub free_space: Vec<Aabb>,
}

impl RoomSpec {
    pub fn bounds(&self) -> Aabb {
        Aabb {
            min: self.min,
            max: self.max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedObjectSpec {
    pub id: ObjectId,
    pub category: CategoryName,
    pub position: Vec3,
    #[serde(default)]
    pub yaw: f64,
    pub radius: Option<f64>,
    #[serde(default)]
    pub open: bool,
    #[serde(default)]
    pub toggled_on: bool,
    #[serde(default)]
    pub on_floor: bool,
}

impl SceneManifest {
    pub fn from_toml(text: &str) -> Result<Self, WorldError> {
        let m: SceneManifest =
            toml::from_str(text).map_err(|e| WorldError::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        let bad = |msg: String| Err(WorldError::Manifest(msg));
        if self.manifest_version != MANIFEST_VERSION {
            return bad(format!(
                "unsupported manifest_version {} (expected {MANIFEST_VERSION})",
                self.manifest_version
            ));
        }
        if !self.agent.is_finite() {
            return bad("agent pose is not finite".into());
        }
        let mut rooms = std::collections::BTreeSet::new();
        for r in &self.room {
            if !rooms.insert(&r.name) {
                return bad(format!("duplicate room `{}`", r.name));
            }
            if !r.bounds().has_area() {
                return bad(format!("room `{}` has an empty footprint", r.name));
            }
            for fs in &r.free_space {
                let inside = r.bounds().contains(fs.min) && r.bounds().contains(fs.max);
                if !inside || fs.min.iter().zip(fs.max).any(|(a, b)| *a > b) {
                    return bad(format!("free space of `{}` lies outside the room", r.name));
                }
            }
        }
        let mut ids = std::collections::BTreeSet::new();
        for o in &self.fixed_object {
            if !ids.insert(&o.id) {
                return bad(format!("duplicate object id `{}`", o.id));
            }
            if !(Pose { position: o.position, yaw: o.yaw }).is_finite() {
                return bad(format!("object `{}` has a non-finite pose", o.id));
            }
            if o.radius.is_some_and(|r| !(r.is_finite() && r > 0.0)) {
                return bad(format!("object `{}` needs a positive radius", o.id));
            }
        }
        Ok(())
    }
}

impl SceneState {
    /// Initial scene with only the manifest's fixed objects.
    pub fn from_manifest(manifest: &SceneManifest, taxonomy: &Taxonomy) -> Result<Self, WorldError> {
        manifest.validate()?;
        let config = manifest.config.clone();
        let mut state = SceneState::empty(config.clone());
        state.agent = AgentState::standing_at(manifest.agent);
        for r in &manifest.room {
            state.rooms.insert(r.name.clone(), r.bounds());
        }
        for spec in &manifest.fixed_object {
            let mut o = ObjectInstance::new(
                spec.id.clone(),
                spec.category.clone(),
                spec.position,
                taxonomy,
                &config,
            )?;
            o.pose.yaw = spec.yaw;
            o.fixed = true;
            o.bounding_radius = spec.radius.unwrap_or(config.default_object_radius);
            o.ext.open = spec.open;
            o.ext.toggled_on = spec.toggled_on;
            if spec.on_floor {
                state.on_floor.insert(spec.id.clone());
            }
            state.objects.insert(spec.id.clone(), o);
        }
        Ok(state)
    }
}
