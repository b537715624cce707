//! Taxi trip records to requests.

use std::path::Path;

use chrono::{NaiveDateTime, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::InstanceConfig;
use crate::model::{manhattan_distance, GeoPoint, Instance, ModelError, Request, RequestId, Vehicle, VehicleId};

const EARTH_RADIUS_M: f64 = 6_371_008.8;

const TIME_FORMATS: [&str; 3] = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%m/%d/%Y %I:%M:%S %p"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed input: {0}")]
    Csv(#[from] csv::Error),
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Equirectangular projection about the center of the configured box, in
/// meters east and north of that center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    lon0: f64,
    lat0: f64,
    m_per_lon: f64,
    m_per_lat: f64,
}

impl Projection {
    pub fn for_config(cfg: &InstanceConfig) -> Self {
        let lon0 = (cfg.min_lon + cfg.max_lon) / 2.0;
        let lat0 = (cfg.min_lat + cfg.max_lat) / 2.0;
        let m_per_lat = EARTH_RADIUS_M * std::f64::consts::PI / 180.0;
        Self {
            lon0,
            lat0,
            m_per_lon: m_per_lat * lat0.to_radians().cos(),
            m_per_lat,
        }
    }

    pub fn project(&self, lon: f64, lat: f64) -> GeoPoint {
        GeoPoint::new((lon - self.lon0) * self.m_per_lon, (lat - self.lat0) * self.m_per_lat)
    }

    pub fn unproject(&self, p: GeoPoint) -> (f64, f64) {
        (self.lon0 + p.x / self.m_per_lon, self.lat0 + p.y / self.m_per_lat)
    }
}

/// Projected corners of the configured box: `(min, max)`.
pub fn planar_extent(cfg: &InstanceConfig) -> (GeoPoint, GeoPoint) {
    let proj = Projection::for_config(cfg);
    (proj.project(cfg.min_lon, cfg.min_lat), proj.project(cfg.max_lon, cfg.max_lat))
}

fn in_box(cfg: &InstanceConfig, lon: f64, lat: f64) -> bool {
    (cfg.min_lon..=cfg.max_lon).contains(&lon) && (cfg.min_lat..=cfg.max_lat).contains(&lat)
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    TIME_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IngestReport {
    pub requests: Vec<Request>,
    pub rows: usize,
    /// Rows that could not be parsed or describe a zero-length trip.
    pub skipped: usize,
    /// Well-formed rows outside the box or the time window.
    pub filtered: usize,
    pub warning: Option<String>,
}

/// Reads delimited trip records with a header row. Keeps rows whose pickup
/// and dropoff lie in the box and whose pickup time of day lies in the
/// window (start inclusive, end exclusive). Request ids are 1-based data row
/// numbers.
pub fn ingest_trip_records(path: &Path, cfg: &InstanceConfig) -> Result<IngestReport, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(file, cfg)
}

pub fn ingest_reader<R: std::io::Read>(reader: R, cfg: &InstanceConfig) -> Result<IngestReport, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(cfg.delimiter.as_bytes()[0])
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let (c_time, c_olon, c_olat, c_dlon, c_dlat) = (
        col(&cfg.pickup_time_col)?,
        col(&cfg.pickup_lon_col)?,
        col(&cfg.pickup_lat_col)?,
        col(&cfg.dropoff_lon_col)?,
        col(&cfg.dropoff_lat_col)?,
    );
    let (w_start, w_end) = cfg.window().map_err(|e| ModelError::InvalidParams(e.to_string()))?;
    let proj = Projection::for_config(cfg);
    let p = &cfg.params;

    let mut out = IngestReport::default();
    for (row, record) in rdr.records().enumerate() {
        out.rows += 1;
        let Ok(record) = record else {
            out.skipped += 1;
            continue;
        };
        let num = |i: usize| record.get(i).and_then(|s| s.trim().parse::<f64>().ok()).filter(|x| x.is_finite());
        let (Some(when), Some(olon), Some(olat), Some(dlon), Some(dlat)) = (
            record.get(c_time).and_then(parse_timestamp),
            num(c_olon),
            num(c_olat),
            num(c_dlon),
            num(c_dlat),
        ) else {
            out.skipped += 1;
            continue;
        };
        let tod = when.time().num_seconds_from_midnight();
        if !(in_box(cfg, olon, olat) && in_box(cfg, dlon, dlat)) || tod < w_start || tod >= w_end {
            out.filtered += 1;
            continue;
        }
        let origin = proj.project(olon, olat);
        let destination = proj.project(dlon, dlat);
        let length = manhattan_distance(origin, destination);
        let depart = when.and_utc().timestamp() as f64;
        let arrive = depart + cfg.arrival_slack * length / p.v_bar;
        match Request::new(RequestId(row as u32 + 1), origin, destination, depart, arrive) {
            Ok(r) => out.requests.push(r),
            Err(_) => out.skipped += 1,
        }
    }
    if out.requests.is_empty() {
        out.warning = Some(format!(
            "no trip records survived filtering ({} rows, {} skipped, {} outside box or window)",
            out.rows, out.skipped, out.filtered
        ));
    }
    Ok(out)
}

/// `cfg.fleet_size` vehicles drawn uniformly over the box from `cfg.seed`.
pub fn place_fleet(cfg: &InstanceConfig) -> Vec<Vehicle> {
    let (lo, hi) = planar_extent(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.fleet_size)
        .map(|k| {
            let at = GeoPoint::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
            Vehicle::new(VehicleId(k as u32), at)
        })
        .collect()
}

/// Ingested requests plus a seeded fleet.
pub fn ingest_instance(path: &Path, cfg: &InstanceConfig) -> Result<(Instance, IngestReport), IngestError> {
    let report = ingest_trip_records(path, cfg)?;
    let instance = Instance::new(report.requests.clone(), place_fleet(cfg))?;
    Ok((instance, report))
}
