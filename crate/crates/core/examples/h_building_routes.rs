//! Routes and link classes from both APs of the H-building to a few spots.

use indoor_mmwave::layout::{classify_link, Point};
use indoor_mmwave::scene::load_scene;

fn main() -> indoor_mmwave::Result<()> {
    let scene = load_scene("h_building")?;
    let layout = &scene.layout;
    println!(
        "{} corridors, {} rooms, {} APs",
        layout.corridors().len(),
        layout.rooms().len(),
        layout.access_points().len()
    );
    let spots = [
        Point::new(30.0, 0.0),
        Point::new(0.0, 10.0),
        Point::new(-40.0, 20.0),
        Point::new(20.0, 4.0),
        Point::new(-20.0, -4.0),
        Point::new(30.0, 24.0),
    ];
    for ap in layout.access_points() {
        for p in spots {
            let r = layout.route(ap.position, p)?;
            println!(
                "{:>9} -> ({:>5.1},{:>5.1}): {:<14} legs {:?} turns {} manhattan {:.1} m euclid {:.1} m",
                ap.id,
                p.x,
                p.y,
                classify_link(&r).as_str(),
                r.segments,
                r.n_turns,
                r.manhattan_d,
                r.euclidean_d
            );
        }
    }
    Ok(())
}
