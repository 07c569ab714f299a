fn main() {
    std::process::exit(cslgrav_cli::run(std::env::args_os()));
}
