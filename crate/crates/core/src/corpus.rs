//! Bundled fixtures: the domain registry, the category taxonomy, a kitchen
//! scene manifest, a handful of activity definitions and a demo script.

use crate::syntax::{parse_domain, parse_problem, ActivityDefinition, DomainDefinition};
use crate::taxonomy::Taxonomy;
use crate::world::SceneManifest;

pub const DOMAIN: &str = include_str!("../data/igibson.domain.bddl");
pub const TAXONOMY: &str = include_str!("../data/taxonomy.toml");
pub const KITCHEN_SCENE: &str = include_str!("../data/scenes/kitchen.toml");

pub const PACKING_LUNCHES: &str = include_str!("../data/activities/packing_lunches.bddl");
pub const SERVING_HORS_DOEUVRES: &str =
    include_str!("../data/activities/serving_hors_doeuvres.bddl");
pub const COOKING_CHICKEN: &str = include_str!("../data/activities/cooking_chicken.bddl");
pub const CLEANING_TABLE: &str = include_str!("../data/activities/cleaning_table.bddl");
pub const SLICING_FRUIT: &str = include_str!("../data/activities/slicing_fruit.bddl");
pub const STORING_FOOD: &str = include_str!("../data/activities/storing_food.bddl");

pub const PACKING_LUNCHES_SCRIPT: &str = include_str!("../data/scripts/packing_lunches.script");

/// Every shipped activity, keyed by file stem.
pub const ACTIVITIES: &[(&str, &str)] = &[
    ("packing_lunches", PACKING_LUNCHES),
    ("serving_hors_doeuvres", SERVING_HORS_DOEUVRES),
    ("cooking_chicken", COOKING_CHICKEN),
    ("cleaning_table", CLEANING_TABLE),
    ("slicing_fruit", SLICING_FRUIT),
    ("storing_food", STORING_FOOD),
];

pub fn domain() -> DomainDefinition {
    parse_domain(DOMAIN).expect("bundled domain parses")
}

pub fn taxonomy() -> Taxonomy {
    Taxonomy::from_toml(TAXONOMY).expect("bundled taxonomy loads")
}

pub fn kitchen_scene() -> SceneManifest {
    SceneManifest::from_toml(KITCHEN_SCENE).expect("bundled scene loads")
}

/// Parses a bundled activity by stem; `None` if no such activity ships.
pub fn activity(name: &str) -> Option<ActivityDefinition> {
    let text = ACTIVITIES.iter().find(|(n, _)| *n == name)?.1;
    Some(parse_problem(text, &domain()).expect("bundled activity parses"))
}
