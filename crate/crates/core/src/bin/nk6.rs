fn main() {
    std::process::exit(nk6::cli::main_with_args(std::env::args_os()));
}
