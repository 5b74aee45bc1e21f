// Evaluate a quantified goal against hand-written fact sets.

use bddl::corpus;
use bddl::logic::{evaluate, Binding, Universe};
use bddl::world::FactSet;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let def = corpus::activity("packing_lunches").ok_or("missing activity")?;
    let goal = def.goal.as_ref().ok_or("empty goal")?;
    let universe = Universe::new(&def.objects, &corpus::taxonomy())?;

    let mut facts: FactSet = [
        "(inside hamburger.n.01_1 basket.n.01_1)",
        "(inside apple.n.01_1 basket.n.01_1)",
        "(inside water.n.06_1 basket.n.01_1)",
    ]
    .iter()
    .map(|s| s.parse())
    .collect::<Result<_, _>>()?;
    println!("packed, basket elsewhere: {}", evaluate(goal, &facts, &Binding::new(), &universe)?);

    facts.insert("(ontop basket.n.01_1 countertop.n.01_1)".parse()?);
    println!("basket on the counter:    {}", evaluate(goal, &facts, &Binding::new(), &universe)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
