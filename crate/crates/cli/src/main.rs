fn main() {
    std::process::exit(exdual_cli::run(std::env::args_os()));
}
