fn main() {
    std::process::exit(f2norm::cli::run(std::env::args_os()));
}
