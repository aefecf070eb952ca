fn main() {
    std::process::exit(bscvt::cli::main_with_args(std::env::args_os()));
}
