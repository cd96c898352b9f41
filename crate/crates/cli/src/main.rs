fn main() {
    std::process::exit(wga_cli::main_with_args(std::env::args_os()));
}
