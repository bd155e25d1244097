fn main() {
    std::process::exit(absphase::cli::run(std::env::args_os()));
}
