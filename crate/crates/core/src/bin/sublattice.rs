fn main() {
    std::process::exit(sublattice_core::cli::main_with_args(std::env::args_os()));
}
