fn main() {
    std::process::exit(archi::cli_main());
}
