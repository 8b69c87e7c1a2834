fn main() {
    std::process::exit(hull_lab::main_with_args(std::env::args_os()));
}
