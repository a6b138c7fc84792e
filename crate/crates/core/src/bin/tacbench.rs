fn main() {
    std::process::exit(proactive_tactile::bench::cli::main());
}
