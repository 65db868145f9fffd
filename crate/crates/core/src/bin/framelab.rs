fn main() {
    std::process::exit(framelab::cli::main_from_args(std::env::args_os()));
}
