// Instantiate an activity in a scene from a seed, and check goal feasibility.

use bddl::corpus;
use bddl::logic::{Universe, DEFAULT_CAP};
use bddl::sampler::{check_goal_feasibility, instantiate};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (tax, domain, scene) = (corpus::taxonomy(), corpus::domain(), corpus::kitchen_scene());
    let def = corpus::activity("packing_lunches").ok_or("missing activity")?;

    for seed in [0, 1, 2] {
        let r = instantiate(&def, &scene, &tax, &domain, seed)?;
        let bound: Vec<String> = r.binding.iter().map(|(c, o)| format!("{c}->{o}")).collect();
        println!("seed {seed}: {}", bound.join(", "));
    }
    let again = instantiate(&def, &scene, &tax, &domain, 0)?;
    assert_eq!(again, instantiate(&def, &scene, &tax, &domain, 0)?);

    for (name, _) in corpus::ACTIVITIES {
        let def = corpus::activity(name).unwrap();
        let universe = Universe::new(&def.objects, &tax)?;
        let report = check_goal_feasibility(&def, &universe, &tax, &domain, DEFAULT_CAP)?;
        println!("{name:<22} {} of {} options consistent", report.consistent, report.options);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
