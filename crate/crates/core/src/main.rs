fn main() {
    std::process::exit(curved_oscillator::cli::run(std::env::args_os()));
}
