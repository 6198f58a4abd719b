fn main() {
    std::process::exit(toptrap_cli::run(std::env::args_os()));
}
