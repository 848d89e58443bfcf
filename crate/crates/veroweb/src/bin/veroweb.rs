fn main() {
    std::process::exit(veroweb::cli::main_with(std::env::args_os()));
}
