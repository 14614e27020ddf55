use clap::Parser;

mod cli;

fn main() {
    let cfg = cli::RunConfig::parse();
    std::process::exit(cli::run(&cfg));
}
