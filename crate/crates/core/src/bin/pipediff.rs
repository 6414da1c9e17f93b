fn main() {
    std::process::exit(pipediff::cli::cli_main(std::env::args_os()));
}
