fn main() {
    std::process::exit(quantum_subgroups::cli::run(std::env::args_os()));
}
