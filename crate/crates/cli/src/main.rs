fn main() {
    std::process::exit(patcx_cli::run(std::env::args_os()));
}
