fn main() {
    std::process::exit(vh_reef::cli::main_with_args(std::env::args_os()));
}
