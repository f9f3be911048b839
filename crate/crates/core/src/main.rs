fn main() {
    std::process::exit(toricopt::cli::run(std::env::args_os()));
}
