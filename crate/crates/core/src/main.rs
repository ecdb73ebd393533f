fn main() {
    std::process::exit(msi_forge::cli::main_with_args(std::env::args_os()));
}
