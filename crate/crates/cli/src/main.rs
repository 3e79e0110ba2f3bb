fn main() {
    std::process::exit(supershift_cli::run(std::env::args_os()));
}
