fn main() {
    std::process::exit(lck::cli::run(std::env::args_os()));
}
