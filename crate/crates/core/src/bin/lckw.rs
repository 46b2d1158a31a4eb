fn main() -> std::process::ExitCode {
    lck_workbench::cli::main()
}
