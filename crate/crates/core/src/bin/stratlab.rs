fn main() {
    std::process::exit(stratlab::cli::run(std::env::args_os()));
}
