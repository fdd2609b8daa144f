fn main() {
    std::process::exit(inh_fr3_cli::run(std::env::args_os()));
}
