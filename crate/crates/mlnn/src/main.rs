use clap::Parser;

fn main() -> anyhow::Result<()> {
    let cli = mlnn::commands::Cli::parse();
    let stdout = std::io::stdout();
    mlnn::commands::run(&cli, &mut stdout.lock())
}
