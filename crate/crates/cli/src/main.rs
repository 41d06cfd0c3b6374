fn main() {
    std::process::exit(hydromag_cli::run(std::env::args_os()));
}
