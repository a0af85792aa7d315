fn main() {
    std::process::exit(nlsg::cli::run(std::env::args().skip(1)));
}
