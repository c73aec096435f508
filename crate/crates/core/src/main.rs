fn main() {
    std::process::exit(galois_core::cli::run(std::env::args_os()));
}
