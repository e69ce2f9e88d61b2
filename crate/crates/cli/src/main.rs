fn main() {
    std::process::exit(hetcrb_cli::run(std::env::args_os()));
}
