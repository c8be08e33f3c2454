fn main() -> std::process::ExitCode {
    entangprops::cli::main()
}
