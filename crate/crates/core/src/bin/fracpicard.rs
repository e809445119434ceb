fn main() {
    std::process::exit(fracpicard::cli::run(std::env::args_os()));
}
