fn main() {
    std::process::exit(darboux_core::cli::main());
}
