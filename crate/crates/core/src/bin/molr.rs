fn main() -> std::process::ExitCode {
    molr::cli::main()
}
