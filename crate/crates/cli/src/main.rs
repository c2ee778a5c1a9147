fn main() {
    std::process::exit(hyperbat_cli::run_from_env());
}
