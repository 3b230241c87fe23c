fn main() {
    std::process::exit(streetweave_cli::cli::run(std::env::args_os()));
}
