fn main() {
    std::process::exit(hplab_core::cli::main());
}
