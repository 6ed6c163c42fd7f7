fn main() {
    std::process::exit(mupir::cli::main())
}
