fn main() {
    std::process::exit(levi_cli::run(std::env::args_os()));
}
