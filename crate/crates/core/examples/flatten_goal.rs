// Flatten goals into options of ground literals and compute activity volume.

use bddl::corpus;
use bddl::logic::{activity_volume, flatten, Universe, DEFAULT_CAP};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tax = corpus::taxonomy();
    for name in ["packing_lunches", "serving_hors_doeuvres"] {
        let def = corpus::activity(name).ok_or("missing activity")?;
        let universe = Universe::new(&def.objects, &tax)?;
        let opts = flatten(def.goal.as_ref().ok_or("empty goal")?, &universe, DEFAULT_CAP)?;
        println!("{name}: {} option(s), volume {}", opts.options.len(), activity_volume(&opts)?);
        for lit in &opts.options[0] {
            println!("  {lit}");
        }

        let capped = flatten(def.goal.as_ref().unwrap(), &universe, 1)?;
        println!("  with cap 1: {} option(s), truncated = {}", capped.options.len(), capped.truncated);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
