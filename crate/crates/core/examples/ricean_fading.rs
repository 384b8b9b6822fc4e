//! Synthetic Ricean traces: fade depth, fade durations, coherence time and
//! the two-moment K estimate.

use indoor_mmwave::fading::{coherence_time, fade_depth_cdf, fade_durations, k_factor_two_moment, ricean_trace, RiceanParams};
use indoor_mmwave::stats::{median, stream_rng};

fn main() -> indoor_mmwave::Result<()> {
    let mut rng = stream_rng(9, 0);
    for (k_db, corr_ms) in [(f64::NEG_INFINITY, 10.0), (0.0, 10.0), (6.5, 20.0), (10.0, 50.0)] {
        let params = RiceanParams::new(k_db, corr_ms);
        let trace = ricean_trace(&params, 740 * 120, &mut rng)?;
        let depth = fade_depth_cdf(&trace)?;
        let fades = fade_durations(&trace, -5.0)?;
        println!(
            "K {k_db:>5} dB: 10% depth {:6.2} dB, K est {:6.2} dB, coherence {:6.2} ms (target {corr_ms}), \
             {} fades below -5 dB, median {:.2} ms",
            depth.quantile(0.1),
            k_factor_two_moment(&trace)?,
            coherence_time(&trace)?,
            fades.len(),
            median(&fades)
        );
    }
    Ok(())
}
