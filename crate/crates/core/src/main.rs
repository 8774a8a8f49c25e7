fn main() {
    std::process::exit(banditgame::cli::main())
}
