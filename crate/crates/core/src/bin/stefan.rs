fn main() {
    std::process::exit(stefan_lab::cli::run(std::env::args_os()));
}
