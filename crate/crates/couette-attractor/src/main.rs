fn main() {
    std::process::exit(couette_attractor::cli::run());
}
