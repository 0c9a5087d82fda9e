fn main() {
    std::process::exit(causet::cli::run(std::env::args_os()));
}
