fn main() -> std::process::ExitCode {
    arbitrage_lab::cli::main()
}
