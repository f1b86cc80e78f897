use clap::Parser;

fn main() {
    let cli = unionavg_cli::Cli::parse();
    std::process::exit(unionavg_cli::execute(&cli));
}
