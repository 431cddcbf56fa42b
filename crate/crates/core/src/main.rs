fn main() {
    std::process::exit(eplab::cli::main_with(std::env::args_os()));
}
