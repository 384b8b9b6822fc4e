//! Tabulates the hallway, corridor-to-room and corner path-gain laws, and
//! shows how the corner constants move with carrier frequency.

use indoor_mmwave::propagation::{pg_los, pg_nlos_room, CornerGeometry, CornerModel, FrequencyScaled};

fn main() -> indoor_mmwave::Result<()> {
    let corner = CornerModel::default();
    let geom = CornerGeometry { d1: 17.0, d2: None };
    println!("{:>6} {:>10} {:>10} {:>14}", "d [m]", "LOS", "room", "corner D1=17");
    for d in [1.0, 2.0, 5.0, 10.0, 17.0, 20.0, 30.0, 50.0, 100.0] {
        println!(
            "{d:>6.0} {:>10.2} {:>10.2} {:>14.2}",
            pg_los(d)?,
            pg_nlos_room(d)?,
            corner.path_gain_at(d, geom)?
        );
    }

    for f in [24.0, 28.0, 38.0, 60.0] {
        let m = corner.scale_frequency(f)?;
        println!("{f:>4} GHz: PL1 = {:7.2} dB, PL_S = {:6.2} dB", m.pl1_db, m.pls_db);
    }
    Ok(())
}
