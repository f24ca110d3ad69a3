fn main() {
    std::process::exit(phishkit::cli::main());
}
