use clap::Parser;
use evdisagg::cli::{run, Cli};

fn main() {
    let filter = std::env::var("EVDISAGG_LOG").unwrap_or_else(|_| "off".into());
    env_logger::Builder::new().parse_filters(&filter).format_timestamp(None).init();

    if let Err(err) = run(Cli::parse()) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
