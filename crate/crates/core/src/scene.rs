//! TOML scene documents: geometry, radio configuration, model parameters,
//! degradation tables and seeds.
//!
//! ```toml
//! version = 1
//!
//! [[geometry.corridors]]
//! id = "main"
//! start = [0.0, 0.0]
//! end = [100.0, 0.0]
//! width = 2.0
//!
//! [[geometry.room_rows]]
//! corridor = "main"
//! side = "north"
//! from = 0.0
//! to = 100.0
//! room_width = 4.0
//! depth = 6.0
//!
//! [[geometry.access_points]]
//! id = "ap0"
//! position = [0.0, 0.0]
//! beams_deg = [0.0]
//! ```
//!
//! Every section except `geometry` is optional and falls back to the
//! library defaults. Unknown keys are rejected.

use std::path::Path;

use serde::Deserialize;

use crate::angular::{DegradationTable, DegradationTables, Environment};
use crate::error::{Error, Result};
use crate::layout::{AccessPoint, Axis, BuildingLayout, Corridor, Point, Room, TerminalPolicy};
use crate::propagation::{CornerModel, PathGainModel};
use crate::syssim::{PropagationModels, RadioConfig};

pub const SCENE_VERSION: u32 = 1;

/// The H-shaped building: two 100 m corridors joined by a 20 m connector,
/// rooms along both sides of each long corridor, one AP at each junction.
pub const H_BUILDING: &str = include_str!("../scenes/h_building.toml");

/// A fully validated scene.
#[derive(Debug, Clone)]
pub struct Scene {
    pub layout: BuildingLayout,
    pub radio: RadioConfig,
    pub models: PropagationModels,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    version: u32,
    geometry: GeometrySection,
    #[serde(default)]
    radio: RadioConfig,
    #[serde(default)]
    models: ModelsSection,
    #[serde(default)]
    degradation: DegradationSection,
    #[serde(default)]
    seeds: SeedsSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySection {
    corridors: Vec<CorridorSpec>,
    #[serde(default)]
    rooms: Vec<RoomSpec>,
    #[serde(default)]
    room_rows: Vec<RoomRowSpec>,
    #[serde(default)]
    access_points: Vec<ApSpec>,
    #[serde(default)]
    terminals: TerminalSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorridorSpec {
    id: String,
    start: [f64; 2],
    end: [f64; 2],
    width: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomSpec {
    id: String,
    min: [f64; 2],
    max: [f64; 2],
    corridor: String,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Side {
    North,
    South,
    East,
    West,
}

/// A row of equal rooms along one side of a corridor.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomRowSpec {
    corridor: String,
    side: Side,
    from: f64,
    to: f64,
    room_width: f64,
    depth: f64,
    /// Gap between the corridor wall and the rooms.
    #[serde(default)]
    offset: f64,
    id_prefix: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApSpec {
    id: String,
    position: [f64; 2],
    #[serde(default)]
    beams_deg: Vec<f64>,
    gain_dbi: Option<f64>,
    tx_power_dbm: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerminalSpec {
    count: usize,
}

impl Default for TerminalSpec {
    fn default() -> Self {
        Self {
            count: TerminalPolicy::default().count,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelsSection {
    los: Option<PathGainModel>,
    room: Option<PathGainModel>,
    corner: Option<CornerModel>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegradationSection {
    los: Option<DegradationTable>,
    hallway_nlos: Option<DegradationTable>,
    room_nlos: Option<DegradationTable>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedsSection {
    simulation: Option<u64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

fn expand_row(row: &RoomRowSpec, corridors: &[Corridor], ci: usize, out: &mut Vec<Room>) -> Result<()> {
    let c = &corridors[ci];
    let bad = |msg: String| Error::Invariant(format!("room row on `{}`: {msg}", c.id));
    if !(row.room_width > 0.0 && row.depth > 0.0 && row.offset >= 0.0) {
        return Err(bad("room_width and depth must be > 0, offset >= 0".into()));
    }
    if !(row.to > row.from) {
        return Err(bad(format!("`to` ({}) must exceed `from` ({})", row.to, row.from)));
    }
    let count = ((row.to - row.from) / row.room_width + 1e-9).floor() as usize;
    if count == 0 {
        return Err(bad("row is shorter than one room".into()));
    }
    let half = c.width / 2.0;
    let side_name = match row.side {
        Side::North => "n",
        Side::South => "s",
        Side::East => "e",
        Side::West => "w",
    };
    let prefix = row.id_prefix.clone().unwrap_or_else(|| format!("{}-{side_name}", c.id));
    for k in 0..count {
        let a0 = row.from + k as f64 * row.room_width;
        let a1 = a0 + row.room_width;
        let (min, max) = match (c.axis(), row.side) {
            (Axis::X, Side::North) => {
                let y0 = c.start.y + half + row.offset;
                (Point::new(a0, y0), Point::new(a1, y0 + row.depth))
            }
            (Axis::X, Side::South) => {
                let y1 = c.start.y - half - row.offset;
                (Point::new(a0, y1 - row.depth), Point::new(a1, y1))
            }
            (Axis::Y, Side::East) => {
                let x0 = c.start.x + half + row.offset;
                (Point::new(x0, a0), Point::new(x0 + row.depth, a1))
            }
            (Axis::Y, Side::West) => {
                let x1 = c.start.x - half - row.offset;
                (Point::new(x1 - row.depth, a0), Point::new(x1, a1))
            }
            _ => return Err(bad("side must be north/south for an x corridor, east/west for a y corridor".into())),
        };
        out.push(Room {
            id: format!("{prefix}{k}"),
            min,
            max,
            corridor: ci,
        });
    }
    Ok(())
}

/// Parses and validates a scene document.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    if !table.contains_key("geometry") {
        return Err(Error::Config("missing section `geometry`".into()));
    }
    if !table.contains_key("version") {
        return Err(Error::Config("missing key `version`".into()));
    }
    let file: SceneFile = toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| line_col(text, s.start));
        match at {
            Some((l, c)) => Error::Config(format!("line {l}, column {c}: {}", e.message())),
            None => Error::Config(e.message().to_string()),
        }
    })?;
    if file.version != SCENE_VERSION {
        return Err(Error::Config(format!(
            "unsupported scene version {} (expected {SCENE_VERSION})",
            file.version
        )));
    }

    let g = file.geometry;
    let corridors: Vec<Corridor> = g
        .corridors
        .iter()
        .map(|c| Corridor::new(c.id.clone(), c.start.into(), c.end.into(), c.width))
        .collect();
    let corridor_idx = |id: &str| {
        corridors
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::Config(format!("unknown corridor `{id}`")))
    };
    let mut rooms = Vec::new();
    for r in &g.rooms {
        rooms.push(Room {
            id: r.id.clone(),
            min: r.min.into(),
            max: r.max.into(),
            corridor: corridor_idx(&r.corridor)?,
        });
    }
    for row in &g.room_rows {
        let ci = corridor_idx(&row.corridor)?;
        // corridor shape errors surface from layout validation below
        if corridors[ci].width > 0.0 && corridors[ci].length() > 0.0 {
            expand_row(row, &corridors, ci, &mut rooms)?;
        }
    }
    let access_points = g
        .access_points
        .into_iter()
        .map(|a| AccessPoint {
            id: a.id,
            position: a.position.into(),
            beams_deg: a.beams_deg,
            gain_dbi: a.gain_dbi,
            tx_power_dbm: a.tx_power_dbm,
        })
        .collect();
    let layout = BuildingLayout::new(corridors, rooms, access_points, TerminalPolicy { count: g.terminals.count })?;

    file.radio.validate()?;
    let defaults = PropagationModels::default();
    let models = PropagationModels {
        los: file.models.los.unwrap_or(defaults.los),
        room: file.models.room.unwrap_or(defaults.room),
        corner: file.models.corner.unwrap_or(defaults.corner),
        degradation: DegradationTables {
            los: file.degradation.los.unwrap_or_else(|| DegradationTable::model_default(Environment::Los)),
            hallway_nlos: file
                .degradation
                .hallway_nlos
                .unwrap_or_else(|| DegradationTable::model_default(Environment::HallwayNlos)),
            room_nlos: file
                .degradation
                .room_nlos
                .unwrap_or_else(|| DegradationTable::model_default(Environment::RoomNlos)),
        },
    };
    models.validate()?;
    Ok(Scene {
        layout,
        radio: file.radio,
        models,
        seed: file.seeds.simulation,
    })
}

/// Loads a scene from a file path, or a shipped scene by name (`h_building`).
pub fn load_scene(name_or_path: &str) -> Result<Scene> {
    let path = Path::new(name_or_path);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        return parse_scene(&text);
    }
    match name_or_path.trim_end_matches(".toml") {
        "h_building" | "h-building" => parse_scene(H_BUILDING),
        _ => Err(Error::Io(format!("scene `{name_or_path}` is neither a file nor a shipped scene"))),
    }
}
