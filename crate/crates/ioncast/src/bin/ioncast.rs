fn main() {
    // Placeholder until the CLI module lands.
    eprintln!("ioncast: not yet wired");
    std::process::exit(1);
}
