fn main() {
    std::process::exit(erjw::run());
}
