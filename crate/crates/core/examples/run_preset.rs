//! Runs one pipeline on a built-in preset and writes its report files.
//!
//! `cargo run --release --example run_preset -- stone ssf /tmp/stone`
//! With only a preset name, prints the preset as TOML (a starting point for
//! `ssf-lab --config`).

use spectral_shift::config::{preset, PRESETS};
use spectral_shift::experiment::Experiment;
use std::path::PathBuf;

fn main() -> spectral_shift::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(name) = args.first() else {
        println!("presets: {}", PRESETS.join(", "));
        return Ok(());
    };
    let config = preset(name)?;
    let Some(command) = args.get(1) else {
        print!("{}", config.to_toml_string()?);
        return Ok(());
    };
    let exp = Experiment::new(config)?;
    let report = exp.run(command)?;
    let dir = args.get(2).map(PathBuf::from).unwrap_or_else(|| exp.output_dir(command));
    report.write(&dir)?;
    print!("{}", report.text());
    println!("wrote {}", dir.display());
    Ok(())
}
