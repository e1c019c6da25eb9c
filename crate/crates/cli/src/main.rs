fn main() {
    std::process::exit(cubic_slice_cli::run(std::env::args_os()));
}
