//! Best-of-six beam selection within a 60 degree sector: gain statistics and
//! the default gain-degradation tables.

use indoor_mmwave::angular::{BeamSelectionModel, DegradationTables, Environment};
use indoor_mmwave::stats::{from_db, stream_rng, EmpiricalCdf};

fn main() -> indoor_mmwave::Result<()> {
    let model = BeamSelectionModel::default();
    let mut rng = stream_rng(3, 0);
    let gains = (0..100_000).map(|_| model.sample_gain(&mut rng)).collect::<indoor_mmwave::Result<Vec<_>>>()?;
    let factor = gains.iter().map(|g| from_db(g - 10.0 * 6f64.log10())).sum::<f64>() / gains.len() as f64;
    let cdf = EmpiricalCdf::new(gains)?;
    println!("ideal gain {:.2} dB, mean linear selection factor {factor:.3}", model.ideal_gain_db());
    println!("gain deciles [dB]: {:.2?}", cdf.deciles());

    let tables = DegradationTables::default();
    for env in Environment::ALL {
        let t = tables.get(env);
        let draws = (0..50_000).map(|_| t.sample(&mut rng)).collect();
        let c = EmpiricalCdf::new(draws)?;
        println!(
            "{:<13} median {:.2} dB, 90% {:.2} dB (anchor {:.1})",
            env.as_str(),
            c.quantile(0.5),
            c.quantile(0.9),
            env.anchor_p90_db()
        );
    }
    Ok(())
}
