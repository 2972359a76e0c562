fn main() {
    std::process::exit(polylog::cli::run(std::env::args_os()));
}
