fn main() {
    std::process::exit(frac_yamabe::cli::main_with_args(std::env::args_os()));
}
