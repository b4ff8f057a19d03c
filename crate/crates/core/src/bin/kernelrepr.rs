fn main() {
    std::process::exit(kernelrepr::cli::main_with(std::env::args_os()));
}
