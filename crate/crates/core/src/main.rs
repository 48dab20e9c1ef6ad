fn main() {
    std::process::exit(lpsolve::cli::main_with_args(std::env::args_os()));
}
