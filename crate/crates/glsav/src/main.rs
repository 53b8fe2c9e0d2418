fn main() {
    std::process::exit(glsav::cli::main());
}
