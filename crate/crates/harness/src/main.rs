fn main() {
    std::process::exit(wrfss_harness::cli::cli_main(std::env::args_os()));
}
