// Ask the category taxonomy about ancestry and predicate applicability.

use bddl::corpus;
use bddl::syntax::CategoryName;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let tax = corpus::taxonomy();
    let domain = corpus::domain();
    let apple: CategoryName = "apple.n.01".parse()?;
    let fruit: CategoryName = "edible_fruit.n.01".parse()?;
    let counter: CategoryName = "countertop.n.01".parse()?;

    println!("{} synsets loaded", tax.len());
    println!("apple is a fruit: {}", tax.is_a(&apple, &fruit)?);
    println!("apple properties: {:?}", tax.properties(&apple)?);
    for pred in ["cooked", "sliced", "open"] {
        println!(
            "{pred}: apple {} / countertop {}",
            tax.applicable(pred, &apple, &domain)?,
            tax.applicable(pred, &counter, &domain)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
