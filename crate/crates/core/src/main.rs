fn main() {
    std::process::exit(chirped_bragg::cli::run(std::env::args_os()));
}
