fn main() {
    std::process::exit(diachrony_cli::run(std::env::args()));
}
