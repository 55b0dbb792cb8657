fn main() {
    std::process::exit(cc_lab::cli::run(std::env::args_os()));
}
