fn main() {
    std::process::exit(cqc_cli::run(std::env::args_os().skip(1)));
}
