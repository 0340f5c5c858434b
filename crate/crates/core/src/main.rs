fn main() {
    std::process::exit(domain_rdm::cli::run(std::env::args_os()));
}
