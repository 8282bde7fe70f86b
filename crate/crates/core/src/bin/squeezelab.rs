fn main() {
    std::process::exit(squeezelab::cli::main_with_args(std::env::args_os()));
}
