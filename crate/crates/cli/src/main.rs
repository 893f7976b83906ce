fn main() {
    std::process::exit(multilin_cli::run(std::env::args_os()));
}
