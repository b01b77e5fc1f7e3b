fn main() {
    std::process::exit(equimax::cli::run(std::env::args_os()));
}
