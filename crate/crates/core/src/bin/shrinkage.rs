fn main() {
    std::process::exit(shrinkage_lab::cli::run(std::env::args_os()));
}
