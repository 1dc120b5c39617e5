fn main() {
    std::process::exit(uamcast::cli::run(std::env::args_os()));
}
