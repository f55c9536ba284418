fn main() {
    std::process::exit(disslab::cli::run_args(std::env::args_os()));
}
