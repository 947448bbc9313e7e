fn main() {
    std::process::exit(pandora::harness::cli::main());
}
