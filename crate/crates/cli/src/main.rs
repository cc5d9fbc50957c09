fn main() {
    std::process::exit(xlembed_cli::run(std::env::args_os()));
}
