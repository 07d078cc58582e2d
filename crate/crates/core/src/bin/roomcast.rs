fn main() {
    std::process::exit(roomcast::cli::run(std::env::args_os()));
}
