fn main() {
    std::process::exit(bddl::cli::main());
}
