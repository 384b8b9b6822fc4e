//! Writes a synthetic corner survey (418 links) as measurement CSV.
//!
//! ```text
//! cargo run --example synth_corner_data -- [path] [seed]
//! ```

use indoor_mmwave::fitting::{synthesize_corner_survey, write_measurements_csv};
use indoor_mmwave::propagation::CornerModel;
use indoor_mmwave::stats::stream_rng;

fn main() -> indoor_mmwave::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/corner_data.csv").into());
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2014);
    let mut rng = stream_rng(seed, 0);
    let data: Vec<_> = synthesize_corner_survey(&CornerModel::default(), &mut rng)?
        .into_iter()
        .map(|(_, m)| m)
        .collect();
    std::fs::write(&path, write_measurements_csv(&data))?;
    println!("wrote {} links to {path}", data.len());
    Ok(())
}
