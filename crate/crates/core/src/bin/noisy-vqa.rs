fn main() {
    std::process::exit(noisy_vqa::cli::main_with_args(std::env::args().collect()));
}
