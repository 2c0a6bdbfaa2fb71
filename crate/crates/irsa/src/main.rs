fn main() {
    std::process::exit(irsa::cli::dispatch(std::env::args_os()));
}
