use clap::Parser;

fn main() {
    let cli = qem::cli::QemCli::parse();
    if let Err(err) = qem::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
