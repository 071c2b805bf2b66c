fn main() {
    std::process::exit(quadrange::cli::run());
}
