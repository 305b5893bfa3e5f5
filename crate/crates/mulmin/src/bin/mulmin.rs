fn main() -> std::process::ExitCode {
    mulmin::cli::main()
}
