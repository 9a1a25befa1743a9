fn main() {
    std::process::exit(convexheat::harness::cli(std::env::args()));
}
