fn main() -> std::process::ExitCode {
    spca::cli::main()
}
