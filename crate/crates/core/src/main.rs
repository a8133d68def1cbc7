fn main() {
    std::process::exit(buildsatd::cli::run());
}
