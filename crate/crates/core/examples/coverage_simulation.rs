//! Coverage of the H-building at 28 GHz and with the 2 GHz comparison system.
//!
//! ```text
//! cargo run --release --example coverage_simulation -- [terminals] [out_dir]
//! ```

use indoor_mmwave::scene::load_scene;
use indoor_mmwave::syssim::{simulate_coverage, RadioConfig, SimOptions};

fn main() -> indoor_mmwave::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let out = args.next();
    let scene = load_scene("h_building")?;
    let opts = SimOptions {
        n_terminals: n,
        seed: scene.seed.unwrap_or(7),
        threads: None,
    };
    let mm = simulate_coverage(&scene.layout, &scene.radio, &scene.models, opts)?;
    let legacy = simulate_coverage(&scene.layout, &RadioConfig::comparison_2ghz(), &scene.models, opts)?;
    for (label, cov) in [("28 GHz", &mm), ("2 GHz", &legacy)] {
        println!(
            "{label:>6}: SINR 10% {:6.2} dB, 50% {:6.2} dB | rate 10% {:7.3} Gbps, 50% {:7.3} Gbps",
            cov.sinr_cdf.quantile(0.1),
            cov.sinr_cdf.quantile(0.5),
            cov.rate_cdf.quantile(0.1) / 1e9,
            cov.rate_cdf.quantile(0.5) / 1e9
        );
    }
    println!(
        "10% rate ratio 28/2 GHz: {:.1}",
        mm.rate_cdf.quantile(0.1) / legacy.rate_cdf.quantile(0.1)
    );
    if let Some(dir) = out {
        mm.write_outputs(std::path::Path::new(&dir))?;
        println!("wrote outputs to {dir}");
    }
    Ok(())
}
