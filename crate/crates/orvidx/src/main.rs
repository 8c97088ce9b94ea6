fn main() {
    std::process::exit(orvidx::cli::run(std::env::args_os()));
}
