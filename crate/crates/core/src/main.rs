fn main() {
    std::process::exit(motcoh::cli::main_with_args(std::env::args_os()));
}
