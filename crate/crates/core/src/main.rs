fn main() {
    std::process::exit(erpack::cli::main_with_args(std::env::args_os()));
}
