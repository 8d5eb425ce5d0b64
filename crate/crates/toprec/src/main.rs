fn main() {
    std::process::exit(toprec::cli::run());
}
