// Drive the symbolic world: load a scene, apply primitives, run heat transfer.

use bddl::corpus;
use bddl::world::{apply_primitive, eval_atomic, step_processes, Action, ObjectId, ObjectInstance, SceneState};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tax = corpus::taxonomy();
    let domain = corpus::domain();
    let manifest = corpus::kitchen_scene();
    let mut state = SceneState::from_manifest(&manifest, &tax)?;

    let chicken = ObjectInstance::new(
        ObjectId::new("chicken.n.01_1"),
        "chicken.n.01".parse()?,
        [1.0, 2.0, 0.0],
        &tax,
        &state.config,
    )?;
    state.objects.insert(chicken.id.clone(), chicken);
    state.on_floor.insert(ObjectId::new("chicken.n.01_1"));

    for line in ["navigate_to chicken.n.01_1", "grasp right chicken.n.01_1", "navigate_to stove_2", "place_on_top right stove_2", "toggle stove_2"] {
        let action: Action = line.parse()?;
        state = apply_primitive(&state, &action)?;
        println!("{line:<32} clock {:>5.1} s", state.clock);
    }

    // fixed furniture cannot be picked up
    let blocked = apply_primitive(&state, &"grasp left fridge_12".parse()?);
    println!("grasp the fridge itself: {blocked:?}");

    for _ in 0..4 {
        state = step_processes(&state, 30.0);
        let t = state.object(&ObjectId::new("chicken.n.01_1"))?.ext.temperature;
        let cooked = eval_atomic(&state, &"(cooked chicken.n.01_1)".parse()?, &tax, &domain)?;
        println!("t = {:>5.1} s  chicken {t:6.1} °C  cooked = {cooked}", state.clock);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
