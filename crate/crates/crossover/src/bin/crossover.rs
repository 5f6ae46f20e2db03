fn main() {
    std::process::exit(crossover::cli::run_from(std::env::args_os()));
}
