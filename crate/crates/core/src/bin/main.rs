fn main() {
    std::process::exit(ccg_bootstrap::cli::run());
}
