use clap::Parser;

fn main() -> std::process::ExitCode {
    sympconn_cli::run(sympconn_cli::Cli::parse())
}
