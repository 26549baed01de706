fn main() {
    std::process::exit(shannon_bounds::cli::run(std::env::args_os()));
}
