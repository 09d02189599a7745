fn main() {
    std::process::exit(jacobi_cone::cli::run(std::env::args_os()));
}
