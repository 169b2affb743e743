use clap::Parser;

fn main() {
    let cli = helmcloak::cli::Cli::parse();
    std::process::exit(helmcloak::cli::run(cli));
}
