use clap::Parser;
use fockroof::cli::{run, RunConfig};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cfg = RunConfig::parse();
    if let Err(e) = run(&cfg) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
