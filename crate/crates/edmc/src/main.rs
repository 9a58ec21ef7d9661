fn main() {
    std::process::exit(edmc::cli::run(std::env::args_os()));
}
