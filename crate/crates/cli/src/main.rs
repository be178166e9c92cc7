fn main() {
    std::process::exit(andloc_cli::run(std::env::args_os()));
}
