fn main() {
    std::process::exit(savanna::cli::run(std::env::args_os()));
}
