fn main() {
    std::process::exit(szego_qd::cli::main_with_args(std::env::args_os()));
}
