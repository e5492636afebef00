fn main() {
    std::process::exit(robin_lab_cli::cli_main(std::env::args_os()));
}
