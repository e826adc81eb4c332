fn main() {
    std::process::exit(sideinfo::cli::main_from_args(std::env::args_os()));
}
