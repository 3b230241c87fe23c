//! Writes the synthetic datasets under `scenarios/data/`.
//!
//! cargo run -p streetweave-cli --example generate_samples [-- <out-dir>]

use std::path::PathBuf;

use streetweave::synth::samples;

fn main() -> std::io::Result<()> {
    let out = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/data")
    });
    std::fs::create_dir_all(&out)?;
    let files = [
        ("grid.geojson", samples::grid().geojson()),
        ("sidewalk.csv", samples::sidewalk_csv()),
        ("crime.csv", samples::crime_csv()),
        ("requests311.csv", samples::requests311_csv()),
    ];
    for (name, body) in files {
        std::fs::write(out.join(name), body)?;
        println!("wrote {}", out.join(name).display());
    }
    Ok(())
}
