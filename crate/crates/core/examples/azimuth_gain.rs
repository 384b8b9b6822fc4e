//! Azimuth gain of a few spectra and the rotational-average identity: the
//! mean power seen by a rotating directional antenna equals the omni power.

use indoor_mmwave::angular::{azimuth_gain, rotational_average_power, uncorrelated_response, AngularSpectrum, AntennaPattern};
use indoor_mmwave::stats::stream_rng;

fn main() -> indoor_mmwave::Result<()> {
    println!("uniform      {:6.2} dB", azimuth_gain(&AngularSpectrum::uniform()));
    println!("single bin   {:6.2} dB", azimuth_gain(&AngularSpectrum::delta(90)));

    // two clusters, 20 dB apart
    let bins: Vec<f64> = (0..360)
        .map(|a| {
            let d = |c: f64| ((a as f64 - c + 540.0) % 360.0 - 180.0).abs();
            (-(d(45.0) / 8.0).powi(2)).exp() + 0.01 * (-(d(210.0) / 15.0).powi(2)).exp() + 1e-4
        })
        .collect();
    let clusters = AngularSpectrum::new(bins)?;
    println!("two clusters {:6.2} dB", azimuth_gain(&clusters));

    let horn = AntennaPattern::gaussian(10.0)?;
    let mut rng = stream_rng(5, 0);
    let n = 2000;
    let mean: f64 = (0..n)
        .map(|_| rotational_average_power(&uncorrelated_response(&clusters, &mut rng), &horn))
        .sum::<indoor_mmwave::Result<f64>>()?
        / n as f64;
    println!(
        "rotational average over {n} realizations: {mean:.5} (omni {:.5})",
        clusters.mean_power()
    );
    Ok(())
}
