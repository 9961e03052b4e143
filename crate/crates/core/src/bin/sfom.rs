fn main() {
    std::process::exit(sfom::cli::main());
}
