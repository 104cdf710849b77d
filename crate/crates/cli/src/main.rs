fn main() {
    std::process::exit(graphquant_cli::run(std::env::args_os()));
}
