fn main() {
    std::process::exit(redfield_teleport::cli::main_with_args(std::env::args_os()));
}
