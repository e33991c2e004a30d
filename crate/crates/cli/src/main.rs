use clap::Parser;

fn main() {
    let cli = bvsim_cli::Cli::parse();
    let code = bvsim_cli::run(
        cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
