fn main() {
    std::process::exit(seqmech::cli::main_with(std::env::args_os()));
}
