fn main() {
    std::process::exit(selberg::cli::run(std::env::args_os()));
}
