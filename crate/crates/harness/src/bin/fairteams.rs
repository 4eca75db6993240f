fn main() {
    std::process::exit(fairteams_harness::cli::main());
}
