fn main() {
    std::process::exit(lax_density::cli::run(std::env::args_os()));
}
