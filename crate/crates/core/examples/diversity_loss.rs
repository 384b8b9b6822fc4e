//! Per-instant selection over directions versus aiming at the direction with
//! the best recent average, for balanced and unbalanced branches.

use indoor_mmwave::fading::{diversity_comparison, ricean_trace, RiceanParams};
use indoor_mmwave::stats::{from_db, stream_rng};

fn main() -> indoor_mmwave::Result<()> {
    let cases: [(&str, f64, &[f64]); 3] = [
        ("LOS", 6.5, &[0.0, -14.7]),
        ("NLOS", 0.0, &[0.0, -3.4, -6.8]),
        ("balanced", 0.0, &[0.0, 0.0, 0.0]),
    ];
    for (label, k_db, offsets) in cases {
        let traces = offsets
            .iter()
            .enumerate()
            .map(|(i, off)| {
                let mut rng = stream_rng(21, i as u64);
                Ok(ricean_trace(&RiceanParams::new(k_db, 20.0), 740 * 600, &mut rng)?.scaled(from_db(*off)))
            })
            .collect::<indoor_mmwave::Result<Vec<_>>>()?;
        let loss = diversity_comparison(&traces, 200.0, 10)?;
        println!("{label:<9} loss deciles [dB]: {:.2?}", loss.deciles());
    }
    Ok(())
}
