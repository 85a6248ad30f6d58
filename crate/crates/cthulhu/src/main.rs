fn main() {
    std::process::exit(cthulhu::cli::run(std::env::args_os()));
}
