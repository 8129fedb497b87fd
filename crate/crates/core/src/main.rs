fn main() {
    std::process::exit(eigbound::cli::main_with_args(std::env::args_os()));
}
