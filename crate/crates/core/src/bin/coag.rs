fn main() {
    std::process::exit(coag::cli::run(std::env::args_os()));
}
