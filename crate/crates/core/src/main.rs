fn main() {
    std::process::exit(ctrlmod::cli::main_with(std::env::args_os()));
}
