fn main() {
    std::process::exit(opal::report::cli_main());
}
