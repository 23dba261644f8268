fn main() {
    std::process::exit(pioia::cli::run(std::env::args_os()));
}
