fn main() {
    std::process::exit(leapfrog_cli::main_with_args(std::env::args_os()));
}
