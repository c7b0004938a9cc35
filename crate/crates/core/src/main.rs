fn main() {
    std::process::exit(xy_quench::cli::main());
}
