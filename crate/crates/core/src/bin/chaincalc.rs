fn main() {
    std::process::exit(chaincalc::cli::run(std::env::args_os()));
}
