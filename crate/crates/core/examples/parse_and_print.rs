// Parse an activity definition, inspect it, and print its canonical form.

use bddl::corpus;
use bddl::syntax::{parse_problem, print_canonical};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let domain = corpus::domain();
    let def = parse_problem(corpus::PACKING_LUNCHES, &domain)?;
    println!("{}: {} objects, {} init literals", def.problem_name, def.objects.len(), def.init.len());
    for (constant, category) in &def.objects {
        println!("  {constant} - {category}");
    }

    let canonical = print_canonical(&def);
    assert_eq!(parse_problem(&canonical, &domain)?, def);
    println!("{canonical}");

    // errors carry a line and column
    let broken = corpus::PACKING_LUNCHES.replace("(:goal", "(:gaol");
    if let Err(e) = parse_problem(&broken, &domain) {
        println!("rejected: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
