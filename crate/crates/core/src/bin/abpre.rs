fn main() {
    std::process::exit(abpre::cli::run(std::env::args_os()));
}
