fn main() {
    std::process::exit(cnotnet::cli::main());
}
