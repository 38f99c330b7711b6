fn main() {
    std::process::exit(omd_tch::cli::run_cli(std::env::args_os()));
}
