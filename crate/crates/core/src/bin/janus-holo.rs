fn main() {
    std::process::exit(janus_holo::cli::run(std::env::args_os()));
}
