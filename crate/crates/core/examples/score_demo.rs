// Replay a primitive script, write the trajectory log, and score it
// against a slower "human" baseline.

use bddl::corpus;
use bddl::episode::run_script;
use bddl::logic::{flatten, Universe, DEFAULT_CAP};
use bddl::scoring::{normalize_to_human, score_trajectory, FactMode, NormalizeConfig, ScoringContext, TrajectoryLog};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (tax, domain, scene) = (corpus::taxonomy(), corpus::domain(), corpus::kitchen_scene());
    let def = corpus::activity("packing_lunches").ok_or("missing activity")?;
    let log = run_script(&def, &scene, &tax, &domain, 0, corpus::PACKING_LUNCHES_SCRIPT)?;

    // the log survives a trip through its JSONL form
    let log = TrajectoryLog::from_jsonl(&log.to_jsonl())?;

    let universe = Universe::new(&def.objects, &tax)?;
    let options = flatten(def.goal.as_ref().unwrap(), &universe, DEFAULT_CAP)?;
    let ctx = ScoringContext { def: &def, options: &options, taxonomy: &tax, domain: &domain, mode: FactMode::PreferCached };
    let report = score_trajectory(&log, &ctx)?;
    print!("{}", report.to_table());

    let script = corpus::PACKING_LUNCHES_SCRIPT.replace("grasp right apple", "wait 20\ngrasp right apple");
    let slow = score_trajectory(&run_script(&def, &scene, &tax, &domain, 0, &script)?, &ctx)?;
    let ratios = normalize_to_human(&report, &[slow], &NormalizeConfig::default())?;
    println!("t_sim relative to the human: {}", ratios["t_sim"]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
