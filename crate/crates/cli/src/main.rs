use clap::Parser;

fn main() {
    let cli = dini_cli::Cli::parse();
    let code = dini_cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
