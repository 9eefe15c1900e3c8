//! Drives a full run from a TOML configuration file plus command-line
//! overrides, the same way the `nk6` binary does, and prints the
//! human-readable report.
//!
//! `cargo run --example run_config`

use clap::Parser;
use nk6::cli::{emit, run, CliArgs, Format, RunConfig};

const CONFIG: &str = r#"
backend = "s6"
radius = 2.0
points = 8
seed = 42
identities = "I1,I15,I28,I32,einstein,classify"
"#;

fn main() -> nk6::Result<()> {
    let path = std::env::temp_dir().join("nk6_run_config_example.toml");
    std::fs::write(&path, CONFIG)?;
    let args = CliArgs::parse_from([
        "nk6".as_ref(),
        "--config".as_ref(),
        path.as_os_str(),
        "--points".as_ref(),
        "12".as_ref(),
    ]);
    let config = RunConfig::resolve(args)?;
    std::fs::remove_file(&path)?;
    let report = run(&config)?;
    std::io::Write::write_all(&mut std::io::stdout(), &emit(&report, Format::Human)?)?;
    Ok(())
}
