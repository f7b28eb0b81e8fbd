fn main() {
    std::process::exit(dtm_core::cli::run(std::env::args_os()));
}
