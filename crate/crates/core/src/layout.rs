//! Building geometry: corridors, rooms and node placements, plus
//! shortest Manhattan routing over the corridor graph.
//!
//! Corridors are axis-aligned segments of a given width. Routing runs on the
//! graph of corridor centerlines; a position inside a corridor snaps to the
//! centerline, a position inside a room is connected by a perpendicular leg
//! to the centerline of the single corridor the room adjoins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;
/// Allowed gap between a room edge and its corridor wall.
pub const ADJACENCY_TOLERANCE_M: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn approx_eq(&self, other: &Point) -> bool {
        (self.x - other.x).abs() < 1e-7 && (self.y - other.y).abs() < 1e-7
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

/// Axis of a corridor centerline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    pub id: String,
    pub start: Point,
    pub end: Point,
    pub width: f64,
}

impl Corridor {
    pub fn new(id: impl Into<String>, start: Point, end: Point, width: f64) -> Self {
        Self {
            id: id.into(),
            start,
            end,
            width,
        }
    }

    pub fn axis(&self) -> Axis {
        if (self.start.y - self.end.y).abs() < EPS {
            Axis::X
        } else {
            Axis::Y
        }
    }

    pub fn length(&self) -> f64 {
        self.start.distance(&self.end)
    }

    /// Coordinate of the centerline across the corridor axis.
    fn cross(&self) -> f64 {
        match self.axis() {
            Axis::X => self.start.y,
            Axis::Y => self.start.x,
        }
    }

    /// `(lo, hi)` extent along the corridor axis.
    fn span(&self) -> (f64, f64) {
        let (a, b) = match self.axis() {
            Axis::X => (self.start.x, self.end.x),
            Axis::Y => (self.start.y, self.end.y),
        };
        (a.min(b), a.max(b))
    }

    fn along(p: &Point, axis: Axis) -> f64 {
        match axis {
            Axis::X => p.x,
            Axis::Y => p.y,
        }
    }

    fn across(p: &Point, axis: Axis) -> f64 {
        match axis {
            Axis::X => p.y,
            Axis::Y => p.x,
        }
    }

    fn point_at(&self, along: f64) -> Point {
        match self.axis() {
            Axis::X => Point::new(along, self.cross()),
            Axis::Y => Point::new(self.cross(), along),
        }
    }

    /// Whether `p` lies inside the corridor rectangle (boundary inclusive).
    pub fn contains(&self, p: &Point) -> bool {
        let axis = self.axis();
        let (lo, hi) = self.span();
        let t = Self::along(p, axis);
        let c = Self::across(p, axis);
        t >= lo - EPS && t <= hi + EPS && (c - self.cross()).abs() <= self.width / 2.0 + EPS
    }

    /// Foot of the perpendicular from `p` to the centerline, clamped to the segment.
    pub fn project(&self, p: &Point) -> Point {
        let (lo, hi) = self.span();
        self.point_at(Self::along(p, self.axis()).clamp(lo, hi))
    }

    fn on_centerline(&self, p: &Point) -> bool {
        let (lo, hi) = self.span();
        let t = Self::along(p, self.axis());
        (Self::across(p, self.axis()) - self.cross()).abs() < 1e-7 && t >= lo - 1e-7 && t <= hi + 1e-7
    }
}

/// Axis-aligned room tagged with the corridor it adjoins.
#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub id: String,
    pub min: Point,
    pub max: Point,
    /// Index into [`BuildingLayout::corridors`].
    pub corridor: usize,
}

impl Room {
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.min.x - EPS && p.x <= self.max.x + EPS && p.y >= self.min.y - EPS && p.y <= self.max.y + EPS
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x) * (self.max.y - self.min.y)
    }

    fn adjoins(&self, c: &Corridor) -> bool {
        let axis = c.axis();
        let half = c.width / 2.0;
        let (lo, hi) = c.span();
        let (r_lo, r_hi, near_lo, near_hi) = match axis {
            Axis::X => (self.min.x, self.max.x, self.min.y, self.max.y),
            Axis::Y => (self.min.y, self.max.y, self.min.x, self.max.x),
        };
        let overlap = r_hi.min(hi) - r_lo.max(lo);
        if overlap <= EPS {
            return false;
        }
        let above = near_lo - (c.cross() + half);
        let below = (c.cross() - half) - near_hi;
        (-EPS..=ADJACENCY_TOLERANCE_M).contains(&above) || (-EPS..=ADJACENCY_TOLERANCE_M).contains(&below)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint {
    pub id: String,
    pub position: Point,
    /// Beam azimuths in degrees (0 = +x, 90 = +y).
    pub beams_deg: Vec<f64>,
    /// Overrides the radio configuration when set.
    pub gain_dbi: Option<f64>,
    pub tx_power_dbm: Option<f64>,
}

/// How terminals are dropped: `count` terminals, each in a uniformly chosen
/// room at a uniform position inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminalPolicy {
    pub count: usize,
}

impl Default for TerminalPolicy {
    fn default() -> Self {
        Self { count: 1000 }
    }
}

/// Where a position sits in the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Corridor(usize),
    Room(usize),
}

/// Validated building geometry. Immutable once built.
#[derive(Debug, Clone)]
pub struct BuildingLayout {
    corridors: Vec<Corridor>,
    rooms: Vec<Room>,
    access_points: Vec<AccessPoint>,
    terminals: TerminalPolicy,
}

/// A corridor-graph route between two positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    /// Straight corridor legs in traversal order; a new leg starts at every turn.
    pub segments: Vec<f64>,
    pub n_turns: usize,
    /// Corridor travel plus the perpendicular legs into rooms.
    pub manhattan_d: f64,
    /// Straight-line distance between the (centerline-snapped) endpoints.
    pub euclidean_d: f64,
    pub room_penetrations: usize,
}

impl Route {
    /// A single straight corridor leg.
    pub fn straight(d: f64) -> Self {
        Self::from_segments(vec![d], 0)
    }

    /// Route made of corridor legs, with `n_turns = len - 1` and the euclidean
    /// distance taken from the right-angle geometry of the legs.
    pub fn from_segments(segments: Vec<f64>, room_penetrations: usize) -> Self {
        let manhattan_d = segments.iter().sum();
        // alternate x/y legs of a staircase
        let (mut dx, mut dy) = (0.0f64, 0.0f64);
        for (i, s) in segments.iter().enumerate() {
            if i % 2 == 0 {
                dx += s;
            } else {
                dy += s;
            }
        }
        Self {
            n_turns: segments.len().saturating_sub(1),
            segments,
            manhattan_d,
            euclidean_d: dx.hypot(dy),
            room_penetrations,
        }
    }

    /// Distance travelled in corridors only.
    pub fn corridor_d(&self) -> f64 {
        self.segments.iter().sum()
    }
}

/// Which path-gain model applies to a route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkClass {
    Los,
    CorridorRoom,
    AroundCorner,
    OutOfModel,
}

impl LinkClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkClass::Los => "los",
            LinkClass::CorridorRoom => "corridor-room",
            LinkClass::AroundCorner => "around-corner",
            LinkClass::OutOfModel => "out-of-model",
        }
    }
}

impl std::fmt::Display for LinkClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_link(route: &Route) -> LinkClass {
    match (route.n_turns, route.room_penetrations) {
        (0, 0) => LinkClass::Los,
        (0, 1) => LinkClass::CorridorRoom,
        (t, 0) if t >= 1 => LinkClass::AroundCorner,
        _ => LinkClass::OutOfModel,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Heading {
    PosX,
    NegX,
    PosY,
    NegY,
}

struct Edge {
    to: usize,
    len: f64,
    heading: Heading,
}

/// Lexicographic (distance, turns) cost; distances within `EPS` tie.
#[derive(Debug, Clone, Copy)]
struct Cost {
    dist: f64,
    turns: usize,
}

impl Cost {
    fn better_than(&self, other: &Cost) -> bool {
        if (self.dist - other.dist).abs() > 1e-9 {
            self.dist < other.dist
        } else {
            self.turns < other.turns
        }
    }
}

impl BuildingLayout {
    pub fn new(
        corridors: Vec<Corridor>,
        rooms: Vec<Room>,
        access_points: Vec<AccessPoint>,
        terminals: TerminalPolicy,
    ) -> Result<Self> {
        let layout = Self {
            corridors,
            rooms,
            access_points,
            terminals,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn corridors(&self) -> &[Corridor] {
        &self.corridors
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    pub fn access_points(&self) -> &[AccessPoint] {
        &self.access_points
    }

    pub fn terminals(&self) -> TerminalPolicy {
        self.terminals
    }

    pub fn corridor_index(&self, id: &str) -> Option<usize> {
        self.corridors.iter().position(|c| c.id == id)
    }

    fn validate(&self) -> Result<()> {
        if self.corridors.is_empty() {
            return Err(Error::Invariant("layout has no corridors".into()));
        }
        for c in &self.corridors {
            if !(c.start.is_finite() && c.end.is_finite() && c.width.is_finite()) {
                return Err(Error::Invariant(format!("corridor `{}`: coordinates must be finite", c.id)));
            }
            if c.width <= 0.0 {
                return Err(Error::Invariant(format!("corridor `{}`: width must be > 0 (got {})", c.id, c.width)));
            }
            let horizontal = (c.start.y - c.end.y).abs() < EPS;
            let vertical = (c.start.x - c.end.x).abs() < EPS;
            if horizontal == vertical {
                return Err(Error::Invariant(format!(
                    "corridor `{}`: must be axis-aligned with nonzero length",
                    c.id
                )));
            }
        }
        for (i, c) in self.corridors.iter().enumerate() {
            if self.corridors[..i].iter().any(|o| o.id == c.id) {
                return Err(Error::Invariant(format!("corridor id `{}` is not unique", c.id)));
            }
        }
        for r in &self.rooms {
            if !(r.min.is_finite() && r.max.is_finite()) {
                return Err(Error::Invariant(format!("room `{}`: coordinates must be finite", r.id)));
            }
            if r.max.x <= r.min.x || r.max.y <= r.min.y {
                return Err(Error::Invariant(format!("room `{}`: rectangle must have positive area", r.id)));
            }
            let Some(own) = self.corridors.get(r.corridor) else {
                return Err(Error::Invariant(format!("room `{}`: unknown adjoining corridor", r.id)));
            };
            if !r.adjoins(own) {
                return Err(Error::Invariant(format!(
                    "room `{}`: does not adjoin its corridor `{}`",
                    r.id, own.id
                )));
            }
            let others: Vec<&str> = self
                .corridors
                .iter()
                .enumerate()
                .filter(|(i, c)| *i != r.corridor && r.adjoins(c))
                .map(|(_, c)| c.id.as_str())
                .collect();
            if !others.is_empty() {
                return Err(Error::Invariant(format!(
                    "room `{}`: must adjoin exactly one corridor, also touches `{}`",
                    r.id,
                    others.join("`, `")
                )));
            }
        }
        for ap in &self.access_points {
            if !ap.position.is_finite() || ap.beams_deg.iter().any(|b| !b.is_finite()) {
                return Err(Error::Invariant(format!("access point `{}`: values must be finite", ap.id)));
            }
            if !self.corridors.iter().any(|c| c.contains(&ap.position)) {
                return Err(Error::Invariant(format!(
                    "access point `{}`: position must lie inside a corridor",
                    ap.id
                )));
            }
        }
        if !self.is_connected() {
            return Err(Error::Invariant("corridor segments do not form a connected graph".into()));
        }
        Ok(())
    }

    /// Corridor centerline points where corridors meet: shared endpoints,
    /// T-junctions and crossings.
    fn junctions(&self) -> Vec<(usize, Point)> {
        let mut out = Vec::new();
        for (i, a) in self.corridors.iter().enumerate() {
            out.push((i, a.start));
            out.push((i, a.end));
            for (j, b) in self.corridors.iter().enumerate() {
                if i == j {
                    continue;
                }
                if a.axis() != b.axis() {
                    let p = match a.axis() {
                        Axis::X => Point::new(b.cross(), a.cross()),
                        Axis::Y => Point::new(a.cross(), b.cross()),
                    };
                    if a.on_centerline(&p) && b.on_centerline(&p) {
                        out.push((i, p));
                    }
                } else {
                    // collinear neighbours sharing an endpoint
                    for p in [b.start, b.end] {
                        if a.on_centerline(&p) {
                            out.push((i, p));
                        }
                    }
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let (nodes, adj) = self.graph(&[]);
        if nodes.is_empty() {
            return false;
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for e in &adj[u] {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Builds the centerline graph with optional extra stations.
    /// Returns deduplicated node positions and adjacency lists.
    fn graph(&self, extra: &[(usize, Point)]) -> (Vec<Point>, Vec<Vec<Edge>>) {
        let mut nodes: Vec<Point> = Vec::new();
        let node_of = |p: Point, nodes: &mut Vec<Point>| -> usize {
            if let Some(i) = nodes.iter().position(|q| q.approx_eq(&p)) {
                i
            } else {
                nodes.push(p);
                nodes.len() - 1
            }
        };
        let mut stations: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.corridors.len()];
        for (ci, p) in self.junctions().into_iter().chain(extra.iter().copied()) {
            let id = node_of(p, &mut nodes);
            let c = &self.corridors[ci];
            stations[ci].push((Corridor::along(&p, c.axis()), id));
        }
        let mut adj: Vec<Vec<Edge>> = (0..nodes.len()).map(|_| Vec::new()).collect();
        for (ci, st) in stations.iter_mut().enumerate() {
            st.sort_by(|a, b| a.0.total_cmp(&b.0));
            st.dedup_by(|a, b| a.1 == b.1);
            let axis = self.corridors[ci].axis();
            for w in st.windows(2) {
                let (t0, u) = w[0];
                let (t1, v) = w[1];
                let len = t1 - t0;
                if u == v {
                    continue;
                }
                let (fwd, back) = match axis {
                    Axis::X => (Heading::PosX, Heading::NegX),
                    Axis::Y => (Heading::PosY, Heading::NegY),
                };
                adj[u].push(Edge { to: v, len, heading: fwd });
                adj[v].push(Edge { to: u, len, heading: back });
            }
        }
        (nodes, adj)
    }

    /// Finds what contains `p`; corridors take precedence over rooms.
    pub fn locate(&self, p: &Point) -> Result<Location> {
        if let Some(i) = self.corridors.iter().position(|c| c.contains(p)) {
            return Ok(Location::Corridor(i));
        }
        if let Some(i) = self.rooms.iter().position(|r| r.contains(p)) {
            return Ok(Location::Room(i));
        }
        Err(Error::Placement { x: p.x, y: p.y })
    }

    /// Snapped centerline station of `p`, the corridor it lies on, and the
    /// room leg length (0 for corridor positions).
    fn anchor(&self, p: &Point) -> Result<(usize, Point, Point, f64, usize)> {
        match self.locate(p)? {
            Location::Corridor(ci) => {
                let foot = self.corridors[ci].project(p);
                Ok((ci, foot, foot, 0.0, 0))
            }
            Location::Room(ri) => {
                let ci = self.rooms[ri].corridor;
                let foot = self.corridors[ci].project(p);
                Ok((ci, foot, *p, foot.distance(p), 1))
            }
        }
    }

    /// Minimum-Manhattan route from `a` to `b`; ties prefer fewer turns.
    pub fn route(&self, a: Point, b: Point) -> Result<Route> {
        let (ca, foot_a, end_a, leg_a, pen_a) = self.anchor(&a)?;
        let (cb, foot_b, end_b, leg_b, pen_b) = self.anchor(&b)?;
        let (nodes, adj) = self.graph(&[(ca, foot_a), (cb, foot_b)]);
        let src = nodes.iter().position(|q| q.approx_eq(&foot_a)).expect("source station");
        let dst = nodes.iter().position(|q| q.approx_eq(&foot_b)).expect("target station");

        // states: node * 5 (no heading yet, or one of four)
        let hidx = |h: Option<Heading>| match h {
            None => 0,
            Some(Heading::PosX) => 1,
            Some(Heading::NegX) => 2,
            Some(Heading::PosY) => 3,
            Some(Heading::NegY) => 4,
        };
        let n_states = nodes.len() * 5;
        let mut best: Vec<Option<Cost>> = vec![None; n_states];
        let mut done = vec![false; n_states];
        let mut prev: Vec<Option<(usize, f64, Heading)>> = vec![None; n_states];
        let mut state_heading: Vec<Option<Heading>> = vec![None; n_states];
        let start = src * 5;
        best[start] = Some(Cost { dist: 0.0, turns: 0 });

        loop {
            let mut pick: Option<usize> = None;
            for s in 0..n_states {
                if done[s] {
                    continue;
                }
                if let Some(c) = best[s] {
                    if pick.is_none_or(|p| c.better_than(&best[p].unwrap())) {
                        pick = Some(s);
                    }
                }
            }
            let Some(s) = pick else { break };
            done[s] = true;
            let node = s / 5;
            let cur = best[s].unwrap();
            let h_in = state_heading[s];
            for e in &adj[node] {
                let turns = cur.turns + usize::from(h_in.is_some_and(|h| h != e.heading));
                let next = Cost {
                    dist: cur.dist + e.len,
                    turns,
                };
                let t = e.to * 5 + hidx(Some(e.heading));
                if !done[t] && best[t].is_none_or(|b| next.better_than(&b)) {
                    best[t] = Some(next);
                    prev[t] = Some((s, e.len, e.heading));
                    state_heading[t] = Some(e.heading);
                }
            }
        }

        let mut goal: Option<usize> = None;
        for s in dst * 5..dst * 5 + 5 {
            if let Some(c) = best[s] {
                if goal.is_none_or(|g| c.better_than(&best[g].unwrap())) {
                    goal = Some(s);
                }
            }
        }
        let Some(goal) = goal else {
            return Err(Error::NoRoute(a.x, a.y, b.x, b.y));
        };

        let mut legs: Vec<(f64, Heading)> = Vec::new();
        let mut s = goal;
        while let Some((p, len, h)) = prev[s] {
            legs.push((len, h));
            s = p;
        }
        legs.reverse();
        let mut segments: Vec<f64> = Vec::new();
        let mut last: Option<Heading> = None;
        for (len, h) in legs {
            if last == Some(h) {
                *segments.last_mut().unwrap() += len;
            } else {
                segments.push(len);
                last = Some(h);
            }
        }
        if segments.is_empty() {
            segments.push(0.0);
        }
        let corridor: f64 = segments.iter().sum();
        Ok(Route {
            n_turns: segments.len() - 1,
            segments,
            manhattan_d: corridor + leg_a + leg_b,
            euclidean_d: end_a.distance(&end_b),
            room_penetrations: pen_a + pen_b,
        })
    }
}
