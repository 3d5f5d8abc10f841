use clap::Parser;

fn main() {
    let cli = hm_cli::Cli::parse();
    std::process::exit(hm_cli::run(cli));
}
