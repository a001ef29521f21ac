fn main() {
    std::process::exit(rotwave::cli::main_with_args(std::env::args_os()));
}
