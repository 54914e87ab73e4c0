fn main() {
    std::process::exit(parapulse::cli::main_with_args(std::env::args_os()));
}
