fn main() {
    std::process::exit(socialmarket::cli::run(std::env::args_os()));
}
