fn main() {
    std::process::exit(dnet::cli::run(std::env::args().collect()));
}
