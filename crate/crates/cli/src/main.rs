fn main() {
    std::process::exit(young_calculus_cli::main_with(std::env::args_os()));
}
