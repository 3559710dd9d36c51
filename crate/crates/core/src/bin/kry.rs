fn main() {
    std::process::exit(augdef::cli::main_with_args(std::env::args_os()));
}
