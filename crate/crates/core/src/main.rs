fn main() {
    std::process::exit(parkwatch::cli::main());
}
