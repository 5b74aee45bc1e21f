//! Continuous state processes: heating, cooling and wetting.

use super::state::{ObjectId, SceneState};

/// First-order relaxation toward the surrounding temperature.
///
/// An object resting on or in a toggled-on heat source (at any depth) relaxes
/// toward the heat source temperature; everything else toward ambient. Objects
/// inside a running water source gain wetness. Integration is explicit Euler
/// with enough substeps that `rate * h <= 1`, so a single step never overshoots.
pub fn step_processes(state: &SceneState, dt: f64) -> SceneState {
    let mut next = state.clone();
    if dt <= 0.0 || !dt.is_finite() {
        return next;
    }
    let c = &state.config;
    let active = |id: &ObjectId, prop: &str| {
        let o = &state.objects[id];
        o.ext.toggled_on && o.has(prop)
    };
    let substeps = (c.heat_rate * dt).ceil().max(1.0) as usize;
    let h = dt / substeps as f64;
    for (id, obj) in next.objects.iter_mut() {
        let heated = state.ancestors(id).any(|a| active(a, "heat_source"));
        let target = if heated {
            c.heat_source_temperature
        } else {
            c.ambient_temperature
        };
        let mut t = obj.ext.temperature;
        for _ in 0..substeps {
            t += c.heat_rate * h * (target - t);
        }
        obj.ext.set_temperature(t);
        if state.containers(id).any(|a| active(a, "water_source")) {
            obj.ext.wetness = (obj.ext.wetness + c.wetting_rate * dt).min(1.0);
        }
    }
    next.clock += dt;
    next
}
