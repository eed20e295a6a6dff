use clap::Parser;

fn main() {
    let cli = hudsal_cli::Cli::parse();
    if let Err(err) = hudsal_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
