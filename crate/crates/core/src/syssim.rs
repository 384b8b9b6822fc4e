//! Monte-Carlo downlink coverage: link budgets with lognormal shadowing and
//! effective gain degradation, SINR against cross-corridor interference,
//! and Shannon rates.

use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{DegradationTables, Environment};
use crate::error::{Error, Result};
use crate::fading::{ricean_trace, RiceanParams};
use crate::layout::{classify_link, BuildingLayout, LinkClass, Point, Route};
use crate::propagation::{shadowed, CornerModel, PathGainModel};
use crate::stats::{from_db, stream_rng, to_db, EmpiricalCdf};

/// Radio parameters shared by every link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub tx_power_dbm: f64,
    pub ap_gain_dbi: f64,
    pub terminal_gain_dbi: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub carrier_ghz: f64,
    /// Extra loss per turn for routes outside the corner model.
    pub corner_loss_db: f64,
    /// Constant added to every modeled path gain.
    pub pg_offset_db: f64,
    /// Draw an AP-side effective gain degradation for every link.
    pub apply_degradation: bool,
    /// Second, terminal-side degradation draw when set.
    pub terminal_degradation: Option<Environment>,
    pub shadowing: bool,
    /// Multiply in one Ricean power sample per link when set.
    pub ricean_k_db: Option<f64>,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 30.0,
            ap_gain_dbi: 24.0,
            terminal_gain_dbi: 5.0,
            noise_figure_db: 10.0,
            bandwidth_hz: 1e9,
            carrier_ghz: 28.0,
            corner_loss_db: 25.0,
            pg_offset_db: 0.0,
            apply_degradation: true,
            terminal_degradation: Some(Environment::RoomNlos),
            shadowing: true,
            ricean_k_db: None,
        }
    }
}

impl RadioConfig {
    /// Legacy 2 GHz system: 10 MHz, 5 dBi at both ends, path gains 34 dB
    /// above the 28 GHz laws, undegraded antennas.
    pub fn comparison_2ghz() -> Self {
        Self {
            ap_gain_dbi: 5.0,
            terminal_gain_dbi: 5.0,
            bandwidth_hz: 10e6,
            carrier_ghz: 2.0,
            pg_offset_db: crate::propagation::COMPARISON_2GHZ_OFFSET_DB,
            apply_degradation: false,
            terminal_degradation: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("tx_power_dbm", self.tx_power_dbm),
            ("ap_gain_dbi", self.ap_gain_dbi),
            ("terminal_gain_dbi", self.terminal_gain_dbi),
            ("noise_figure_db", self.noise_figure_db),
            ("pg_offset_db", self.pg_offset_db),
        ];
        if let Some((name, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Invariant(format!("radio.{name} must be finite, got {v}")));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::Invariant(format!("radio.bandwidth_hz must be > 0, got {}", self.bandwidth_hz)));
        }
        if !(self.carrier_ghz.is_finite() && self.carrier_ghz > 0.0) {
            return Err(Error::Invariant("radio.carrier_ghz must be > 0".into()));
        }
        if !(self.corner_loss_db.is_finite() && self.corner_loss_db >= 0.0) {
            return Err(Error::Invariant("radio.corner_loss_db must be >= 0".into()));
        }
        if self.ricean_k_db.is_some_and(|k| k.is_nan() || k == f64::INFINITY) {
            return Err(Error::Invariant("radio.ricean_k_db must be finite or -inf".into()));
        }
        Ok(())
    }
}

/// Path-gain laws and degradation tables used for link budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationModels {
    pub los: PathGainModel,
    pub room: PathGainModel,
    pub corner: CornerModel,
    pub degradation: DegradationTables,
}

impl Default for PropagationModels {
    fn default() -> Self {
        Self {
            los: PathGainModel::LOS_28GHZ,
            room: PathGainModel::NLOS_ROOM_28GHZ,
            corner: CornerModel::default(),
            degradation: DegradationTables::default(),
        }
    }
}

impl PropagationModels {
    pub fn validate(&self) -> Result<()> {
        self.los.validate().map_err(|e| Error::Invariant(format!("models.los: {e}")))?;
        self.room.validate().map_err(|e| Error::Invariant(format!("models.room: {e}")))?;
        self.corner.validate()
    }

    /// Median path gain (dB) of a route and the shadowing sigma that goes
    /// with the model chosen for it. `pg_offset_db` is not included.
    pub fn path_gain(&self, route: &Route, corner_loss_db: f64) -> Result<(f64, f64)> {
        let class = classify_link(route);
        let d_euclid = route.euclidean_d.max(1.0);
        match class {
            LinkClass::Los => Ok((self.los.path_gain(route.manhattan_d.max(1.0))?, self.los.shadow_sigma_db)),
            LinkClass::CorridorRoom => Ok((self.room.path_gain(d_euclid)?, self.room.shadow_sigma_db)),
            LinkClass::AroundCorner if route.n_turns <= 2 => {
                Ok((self.corner.path_gain(route)?, self.corner.shadow_sigma_db))
            }
            _ => {
                let base = self.room.path_gain(route.manhattan_d.max(1.0))?;
                Ok((base - corner_loss_db * route.n_turns as f64, self.room.shadow_sigma_db))
            }
        }
    }
}

/// Distance legs the path-gain law is evaluated on, each at least 1 m:
/// the corridor legs for corner-model routes, otherwise a single leg
/// (euclidean for corridor-to-room links, Manhattan for the rest).
pub fn model_legs(route: &Route) -> Vec<f64> {
    match classify_link(route) {
        LinkClass::AroundCorner if route.n_turns <= 2 => route.segments.iter().map(|s| s.max(1.0)).collect(),
        LinkClass::CorridorRoom => vec![route.euclidean_d.max(1.0)],
        _ => vec![route.manhattan_d.max(1.0)],
    }
}

/// Thermal noise floor in dBm.
pub fn noise_floor(cfg: &RadioConfig) -> f64 {
    -174.0 + to_db(cfg.bandwidth_hz) + cfg.noise_figure_db
}

/// `bandwidth * log2(1 + SINR)`; `-inf` dB gives 0.
pub fn shannon_rate(sinr_db: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + from_db(sinr_db)).log2()
}

/// Received power for a known path gain and total gain degradation.
pub fn received_power(cfg: &RadioConfig, pg_db: f64, degradation_db: f64) -> f64 {
    cfg.tx_power_dbm + cfg.ap_gain_dbi + cfg.terminal_gain_dbi + pg_db - degradation_db
}

/// Random parts of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDraw {
    pub class: LinkClass,
    /// Path gain after offset, shadowing and fading.
    pub pg_db: f64,
    pub degradation_db: f64,
    pub rx_power_dbm: f64,
}

/// Draws one link budget along `route`. `None` is an unroutable link and
/// reports `-inf` dBm.
pub fn link_budget<R: Rng + ?Sized>(
    cfg: &RadioConfig,
    models: &PropagationModels,
    route: Option<&Route>,
    rng: &mut R,
) -> Result<LinkDraw> {
    let Some(route) = route else {
        return Ok(LinkDraw {
            class: LinkClass::OutOfModel,
            pg_db: f64::NEG_INFINITY,
            degradation_db: 0.0,
            rx_power_dbm: f64::NEG_INFINITY,
        });
    };
    let class = classify_link(route);
    let (median, sigma) = models.path_gain(route, cfg.corner_loss_db)?;
    let mut pg = median + cfg.pg_offset_db;
    if cfg.shadowing {
        pg = shadowed(pg, sigma, rng);
    }
    if let Some(k_db) = cfg.ricean_k_db {
        pg += to_db(ricean_trace(&RiceanParams::white(k_db), 1, rng)?.samples()[0]);
    }
    let mut degradation = 0.0;
    if cfg.apply_degradation {
        let env = if class == LinkClass::Los {
            Environment::Los
        } else {
            Environment::HallwayNlos
        };
        degradation += models.degradation.get(env).sample(rng);
    }
    if let Some(env) = cfg.terminal_degradation {
        degradation += models.degradation.get(env).sample(rng);
    }
    Ok(LinkDraw {
        class,
        pg_db: pg,
        degradation_db: degradation,
        rx_power_dbm: received_power(cfg, pg, degradation),
    })
}

/// Per-terminal outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkResult {
    pub terminal_id: usize,
    pub position: Point,
    /// `None` when no AP reaches the terminal.
    pub serving_ap: Option<String>,
    pub link_class: LinkClass,
    pub route: Option<Route>,
    pub pg_db: f64,
    pub rx_power_dbm: f64,
    pub interference_dbm: f64,
    pub snr_db: f64,
    pub sinr_db: f64,
    pub shannon_rate_bps: f64,
}

/// Result of a coverage run.
#[derive(Debug, Clone)]
pub struct Coverage {
    pub links: Vec<LinkResult>,
    pub sinr_cdf: EmpiricalCdf,
    pub snr_cdf: EmpiricalCdf,
    /// Rate CDF over every terminal.
    pub rate_cdf: EmpiricalCdf,
    /// Rate CDF of the terminals each AP serves, in AP order; APs that serve
    /// nobody are omitted.
    pub rate_cdf_per_ap: Vec<(String, EmpiricalCdf)>,
    pub noise_floor_dbm: f64,
}

/// Run options beyond the radio configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub n_terminals: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

fn place_terminal<R: Rng + ?Sized>(layout: &BuildingLayout, cumulative_area: &[f64], rng: &mut R) -> Point {
    let total = *cumulative_area.last().unwrap();
    let u = rng.random::<f64>() * total;
    let ri = cumulative_area.partition_point(|&c| c <= u).min(cumulative_area.len() - 1);
    let room = &layout.rooms()[ri];
    let x = room.min.x + rng.random::<f64>() * (room.max.x - room.min.x);
    let y = room.min.y + rng.random::<f64>() * (room.max.y - room.min.y);
    Point::new(x, y)
}

fn simulate_terminal(
    layout: &BuildingLayout,
    cfg: &RadioConfig,
    models: &PropagationModels,
    cumulative_area: &[f64],
    noise_mw: f64,
    seed: u64,
    id: usize,
) -> Result<LinkResult> {
    let mut rng = stream_rng(seed, id as u64);
    let position = place_terminal(layout, cumulative_area, &mut rng);
    let mut draws = Vec::with_capacity(layout.access_points().len());
    for ap in layout.access_points() {
        let route = match layout.route(ap.position, position) {
            Ok(r) => Some(r),
            Err(Error::NoRoute(..)) => None,
            Err(e) => return Err(e),
        };
        let ap_cfg = RadioConfig {
            tx_power_dbm: ap.tx_power_dbm.unwrap_or(cfg.tx_power_dbm),
            ap_gain_dbi: ap.gain_dbi.unwrap_or(cfg.ap_gain_dbi),
            ..cfg.clone()
        };
        let draw = link_budget(&ap_cfg, models, route.as_ref(), &mut rng)?;
        draws.push((route, draw));
    }
    let serving = draws
        .iter()
        .enumerate()
        .filter(|(_, (_, d))| d.rx_power_dbm > f64::NEG_INFINITY)
        .max_by(|a, b| a.1 .1.rx_power_dbm.total_cmp(&b.1 .1.rx_power_dbm))
        .map(|(i, _)| i);
    let Some(s) = serving else {
        return Ok(LinkResult {
            terminal_id: id,
            position,
            serving_ap: None,
            link_class: LinkClass::OutOfModel,
            route: None,
            pg_db: f64::NEG_INFINITY,
            rx_power_dbm: f64::NEG_INFINITY,
            interference_dbm: f64::NEG_INFINITY,
            snr_db: f64::NEG_INFINITY,
            sinr_db: f64::NEG_INFINITY,
            shannon_rate_bps: 0.0,
        });
    };
    let interference_mw: f64 = draws
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != s)
        .map(|(_, (_, d))| from_db(d.rx_power_dbm))
        .sum();
    let (route, draw) = draws.swap_remove(s);
    let rx = draw.rx_power_dbm;
    let sinr_db = rx - to_db(noise_mw + interference_mw);
    Ok(LinkResult {
        terminal_id: id,
        position,
        serving_ap: Some(layout.access_points()[s].id.clone()),
        link_class: draw.class,
        route,
        pg_db: draw.pg_db,
        rx_power_dbm: rx,
        interference_dbm: to_db(interference_mw),
        snr_db: rx - to_db(noise_mw),
        sinr_db,
        shannon_rate_bps: shannon_rate(sinr_db, cfg.bandwidth_hz),
    })
}

/// Drops `opts.n_terminals` terminals uniformly over the room area, serves
/// each from its strongest AP and treats the other APs as interference.
///
/// Terminal `i` draws from its own RNG stream `(seed, i)`, so results do not
/// depend on the number of workers.
pub fn simulate_coverage(
    layout: &BuildingLayout,
    cfg: &RadioConfig,
    models: &PropagationModels,
    opts: SimOptions,
) -> Result<Coverage> {
    cfg.validate()?;
    models.validate()?;
    if layout.access_points().is_empty() {
        return Err(Error::Config("layout has no access points".into()));
    }
    if layout.rooms().is_empty() {
        return Err(Error::Config("layout has no rooms to place terminals in".into()));
    }
    if opts.n_terminals == 0 {
        return Err(Error::Domain("n_terminals must be >= 1".into()));
    }
    let cumulative_area: Vec<f64> = layout
        .rooms()
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r.area();
            Some(*acc)
        })
        .collect();
    let noise_dbm = noise_floor(cfg);
    let noise_mw = from_db(noise_dbm);
    let run = || {
        (0..opts.n_terminals)
            .into_par_iter()
            .map(|id| simulate_terminal(layout, cfg, models, &cumulative_area, noise_mw, opts.seed, id))
            .collect::<Result<Vec<_>>>()
    };
    let links = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    let sinr_cdf = EmpiricalCdf::new(links.iter().map(|l| l.sinr_db).collect())?;
    let snr_cdf = EmpiricalCdf::new(links.iter().map(|l| l.snr_db).collect())?;
    let rate_cdf = EmpiricalCdf::new(links.iter().map(|l| l.shannon_rate_bps).collect())?;
    let mut rate_cdf_per_ap = Vec::new();
    for ap in layout.access_points() {
        let rates: Vec<f64> = links
            .iter()
            .filter(|l| l.serving_ap.as_deref() == Some(ap.id.as_str()))
            .map(|l| l.shannon_rate_bps)
            .collect();
        if !rates.is_empty() {
            rate_cdf_per_ap.push((ap.id.clone(), EmpiricalCdf::new(rates)?));
        }
    }
    Ok(Coverage {
        links,
        sinr_cdf,
        snr_cdf,
        rate_cdf,
        rate_cdf_per_ap,
        noise_floor_dbm: noise_dbm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Deciles {
    sinr_db: [f64; 9],
    snr_db: [f64; 9],
    rate_bps: [f64; 9],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ApSummary {
    ap: String,
    terminals: usize,
    rate_bps_deciles: [f64; 9],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Summary {
    terminals: usize,
    unserved: usize,
    noise_floor_dbm: f64,
    deciles: Deciles,
    per_ap: Vec<ApSummary>,
}

fn opt_num(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Coverage {
    pub fn links_csv(&self) -> String {
        let mut out = String::from(
            "terminal_id,x_m,y_m,serving_ap,link_class,seg1_m,seg2_m,seg3_m,penetrations,n_turns,manhattan_m,euclidean_m,pg_db,rx_power_dbm,interference_dbm,snr_db,sinr_db,shannon_rate_bps\n",
        );
        for l in &self.links {
            let legs = l.route.as_ref().map(model_legs).unwrap_or_default();
            let seg = |i: usize| legs.get(i).map(|v| v.to_string()).unwrap_or_default();
            let (pens, turns, manhattan, euclid) = match &l.route {
                Some(r) => (
                    r.room_penetrations.to_string(),
                    r.n_turns.to_string(),
                    r.manhattan_d.to_string(),
                    r.euclidean_d.to_string(),
                ),
                None => Default::default(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                l.terminal_id,
                l.position.x,
                l.position.y,
                l.serving_ap.as_deref().unwrap_or(""),
                l.link_class,
                seg(0),
                seg(1),
                seg(2),
                pens,
                turns,
                manhattan,
                euclid,
                opt_num(l.pg_db),
                opt_num(l.rx_power_dbm),
                opt_num(l.interference_dbm),
                opt_num(l.snr_db),
                opt_num(l.sinr_db),
                l.shannon_rate_bps,
            ));
        }
        out
    }

    pub fn sinr_cdf_csv(&self) -> String {
        let mut out = String::from("sinr_db,cdf\n");
        for (x, f) in self.sinr_cdf.steps() {
            out.push_str(&format!("{},{f}\n", opt_num(x)));
        }
        out
    }

    pub fn rate_cdf_csv(&self) -> String {
        let mut out = String::from("ap,rate_bps,cdf\n");
        let all = ("all".to_string(), self.rate_cdf.clone());
        for (ap, cdf) in self.rate_cdf_per_ap.iter().chain(std::iter::once(&all)) {
            for (x, f) in cdf.steps() {
                out.push_str(&format!("{ap},{x},{f}\n"));
            }
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let summary = Summary {
            terminals: self.links.len(),
            unserved: self.links.iter().filter(|l| l.serving_ap.is_none()).count(),
            noise_floor_dbm: self.noise_floor_dbm,
            deciles: Deciles {
                sinr_db: self.sinr_cdf.deciles(),
                snr_db: self.snr_cdf.deciles(),
                rate_bps: self.rate_cdf.deciles(),
            },
            per_ap: self
                .rate_cdf_per_ap
                .iter()
                .map(|(ap, cdf)| ApSummary {
                    ap: ap.clone(),
                    terminals: cdf.len(),
                    rate_bps_deciles: cdf.deciles(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
    }

    /// Writes `links.csv`, `sinr_cdf.csv`, `rate_cdf.csv` and `summary.json`.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("links.csv"), self.links_csv())?;
        fs::write(dir.join("sinr_cdf.csv"), self.sinr_cdf_csv())?;
        fs::write(dir.join("rate_cdf.csv"), self.rate_cdf_csv())?;
        fs::write(dir.join("summary.json"), self.summary_json())?;
        Ok(())
    }
}
