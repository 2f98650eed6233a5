fn main() {
    std::process::exit(pequiv::cli::run(std::env::args_os()));
}
