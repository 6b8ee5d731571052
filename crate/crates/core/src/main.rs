fn main() {
    std::process::exit(sizefn::cli::main_with_args(std::env::args_os()));
}
