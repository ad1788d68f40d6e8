use clap::Parser;

fn main() {
    let cli = summax_cli::Cli::parse();
    std::process::exit(summax_cli::run(cli));
}
