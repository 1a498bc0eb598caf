fn main() {
    std::process::exit(courant_cas::cli::main_with_args(std::env::args_os()));
}
