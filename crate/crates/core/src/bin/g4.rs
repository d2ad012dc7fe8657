fn main() {
    std::process::exit(g4_motion::cli::run(std::env::args_os()));
}
