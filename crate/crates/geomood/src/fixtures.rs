//! Deterministic synthetic datasets with recorded ground truth.
//!
//! Real message corpora with known tract-level effects do not exist, so
//! tests and demos work against generated ones: a rectangular tract grid
//! (optionally with holes and enclave islands), a synthetic city whose
//! generator plants a valence shift and a mobility shift in designated
//! check-in tracts and records exactly what it planted, plus small corpora
//! for ingest robustness, lexicon coverage, and correlation recovery.
//! Everything is seeded; identical inputs produce identical bytes.

use crate::error::Error;
use crate::geo::{Geometry, LatLon, Polygon, Ring, EARTH_RADIUS_METERS};
use crate::ingest::{
    write_messages, Demographics, GeoMessage, IngestStats, SentimentLexicon, Tract, VadLexicon,
};
use crate::Result;
use chrono::{Duration, TimeZone, Utc};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

/// Layout of a rectangular tract grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub cols: usize,
    pub rows: usize,
    /// Latitude of the grid's south-west corner.
    pub origin_lat: f64,
    /// Longitude of the grid's south-west corner.
    pub origin_lon: f64,
    /// Cell side length in degrees (cells are square in degree space).
    pub cell_deg: f64,
    /// When set, every 13th cell gets a centered square hole, and a smaller
    /// island inside that hole is attached to the next tract as a second
    /// polygon part — exercising hole exclusion and multi-part containment.
    pub with_holes: bool,
    /// Seed for the synthetic demographics attached to each tract.
    pub seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            cols: 50,
            rows: 40,
            origin_lat: 33.6,
            origin_lon: -118.8,
            cell_deg: 0.02,
            with_holes: false,
            seed: 7,
        }
    }
}

impl GridSpec {
    pub fn tract_count(&self) -> usize {
        self.cols * self.rows
    }

    /// Stable id for the cell at linear index `idx` (row-major).
    pub fn tract_id(&self, idx: usize) -> String {
        format!("T{idx:04}")
    }

    /// South-west corner of cell `idx` as `(lon, lat)`.
    pub fn cell_origin(&self, idx: usize) -> (f64, f64) {
        let col = idx % self.cols;
        let row = idx / self.cols;
        (
            self.origin_lon + col as f64 * self.cell_deg,
            self.origin_lat + row as f64 * self.cell_deg,
        )
    }

    /// Center of cell `idx`.
    pub fn cell_center(&self, idx: usize) -> LatLon {
        let (lon0, lat0) = self.cell_origin(idx);
        LatLon::new(lat0 + self.cell_deg / 2.0, lon0 + self.cell_deg / 2.0)
    }

    /// Whether cell `idx` carries a hole in the holed variant.
    pub fn is_holed(&self, idx: usize) -> bool {
        self.with_holes && idx % 13 == 5
    }

    /// Bounding box `[min_lon, min_lat, max_lon, max_lat]` of the whole grid.
    pub fn bounds(&self) -> [f64; 4] {
        [
            self.origin_lon,
            self.origin_lat,
            self.origin_lon + self.cols as f64 * self.cell_deg,
            self.origin_lat + self.rows as f64 * self.cell_deg,
        ]
    }
}

fn square_ring(lon0: f64, lat0: f64, side: f64) -> Ring {
    Ring::closed(vec![
        [lon0, lat0],
        [lon0 + side, lat0],
        [lon0 + side, lat0 + side],
        [lon0, lat0 + side],
    ])
    .expect("four distinct corners form a ring")
}

/// Hole footprint of a holed cell: `(lon0, lat0, side)` of the hole square.
/// The hole spans the middle 40% of the cell; the island the middle 20%.
pub fn hole_extent(spec: &GridSpec, idx: usize) -> (f64, f64, f64) {
    let (lon0, lat0) = spec.cell_origin(idx);
    let c = spec.cell_deg;
    (lon0 + 0.3 * c, lat0 + 0.3 * c, 0.4 * c)
}

fn island_extent(spec: &GridSpec, idx: usize) -> (f64, f64, f64) {
    let (lon0, lat0) = spec.cell_origin(idx);
    let c = spec.cell_deg;
    (lon0 + 0.4 * c, lat0 + 0.4 * c, 0.2 * c)
}

/// Builds the grid's tracts with seeded demographics (roughly 3% of the
/// demographic values are missing, as in real census extracts).
pub fn grid_tracts(spec: &GridSpec) -> Vec<Tract> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let field = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| -> Option<f64> {
        let value = (rng.random_range(lo..hi) * 10.0).round() / 10.0;
        (!rng.random_bool(0.03)).then_some(value)
    };
    let mut tracts: Vec<Tract> = (0..spec.tract_count())
        .map(|idx| {
            let (lon0, lat0) = spec.cell_origin(idx);
            let mut rings = vec![square_ring(lon0, lat0, spec.cell_deg)];
            if spec.is_holed(idx) {
                let (hlon, hlat, hside) = hole_extent(spec, idx);
                rings.push(square_ring(hlon, hlat, hside));
            }
            Tract {
                tract_id: spec.tract_id(idx),
                geometry: Geometry {
                    polygons: vec![Polygon { rings }],
                },
                demographics: Demographics {
                    median_age: field(25.0, 55.0, &mut rng),
                    hispanic_pop: field(500.0, 5000.0, &mut rng),
                    non_hispanic_pop: field(500.0, 5000.0, &mut rng),
                    pct_employed: field(40.0, 85.0, &mut rng),
                    pct_bachelors: field(5.0, 60.0, &mut rng),
                },
            }
        })
        .collect();
    // Each hole hosts an island that belongs to the *next* tract, so some
    // tracts are multi-part and points inside a hole resolve to nothing
    // while points on the island resolve to the neighbor.
    for idx in 0..spec.tract_count() {
        if spec.is_holed(idx) {
            let (ilon, ilat, iside) = island_extent(spec, idx);
            let owner = (idx + 1) % spec.tract_count();
            tracts[owner].geometry.polygons.push(Polygon {
                rings: vec![square_ring(ilon, ilat, iside)],
            });
        }
    }
    tracts
}

/// Longitude offset (degrees, eastward) that is exactly `meters` of
/// great-circle distance at latitude `lat`.
pub fn eastward_offset_deg(lat: f64, meters: f64) -> f64 {
    let half = (meters / (2.0 * EARTH_RADIUS_METERS)).sin();
    2.0 * (half / lat.to_radians().cos()).asin().to_degrees()
}

// Word pools for generated message text. The neutral and upbeat pools are
// affect-lexicon words (so generated prose is always lexicon-covered); the
// positive/negative pools are strength-lexicon words absent from the affect
// lexicon, so they move P/N without touching V/A/D.
const NEUTRAL_POOL: [&str; 13] = [
    "street", "window", "table", "chair", "paper", "door", "road", "building", "office", "bus",
    "sit", "stand", "thing",
];
const UPBEAT_POOL: [&str; 8] = [
    "happy", "fun", "joy", "win", "sunshine", "beach", "love", "music",
];
const NEGATIVE_POOL: [&str; 7] = [
    "suck", "damn", "rude", "nasty", "dumb", "gross", "pathetic",
];
const POSITIVE_POOL: [&str; 6] = ["yay", "wow", "fabulous", "brilliant", "hilarious", "stunning"];
const VENUE_POOL: [&str; 6] = [
    "Vextorium", "Snergery", "Quorvplex", "Blimporium", "Drostleworks", "Zumbratory",
];
const CITY_POOL: [&str; 6] = [
    "Blayport", "Cruxville", "Mirelle", "Tornbury", "Veskar", "Quillshire",
];
/// Tokens guaranteed to miss the affect lexicon (for coverage corpora).
const NONSENSE_POOL: [&str; 6] = ["zxqv", "blorf", "skree", "nuvix", "tharn", "gelb"];

/// Tuning knobs for the synthetic city.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CityParams {
    pub seed: u64,
    pub grid: GridSpec,
    /// Users living in each tract.
    pub residents_per_tract: usize,
    /// Plain messages posted inside each non-venue tract.
    pub baseline_messages_per_tract: usize,
    /// Plain at-home messages posted inside each venue tract (venue users
    /// post the same number again from their displaced location).
    pub venue_home_messages_per_tract: usize,
    /// How many tracts host venues (receive check-ins).
    pub venue_tract_count: usize,
    /// How many venue tracts stay in the 1–2 check-in tier (the rest get
    /// three or more and form the above-threshold cohort at K=3).
    pub low_tier_count: usize,
    /// How far venue residents roam when away from home.
    pub displaced_distance_m: f64,
}

impl Default for CityParams {
    fn default() -> Self {
        CityParams {
            seed: 42,
            grid: GridSpec::default(),
            residents_per_tract: 5,
            baseline_messages_per_tract: 50,
            venue_home_messages_per_tract: 25,
            venue_tract_count: 210,
            low_tier_count: 110,
            displaced_distance_m: 100_000.0,
        }
    }
}

/// What the city generator actually planted, for exact verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityTruth {
    pub seed: u64,
    pub n_messages: u64,
    pub n_localized: u64,
    pub n_unlocalized: u64,
    pub n_checkins: u64,
    pub n_users: u64,
    pub n_tracts: u64,
    pub users_per_tract: u64,
    pub cohort_all: u64,
    pub cohort_with_checkins: u64,
    pub cohort_above_threshold: u64,
    pub threshold: u64,
    /// Messages containing at least one affect-lexicon term.
    pub vad_covered: u64,
    /// Designed venue-vs-baseline difference in tract mean valence.
    pub expected_valence_shift: f64,
    /// Designed venue-vs-baseline difference in tract mean radius of
    /// gyration, in meters (half the displaced distance).
    pub expected_rg_shift_m: f64,
    pub venue_tracts: BTreeSet<String>,
    pub checkins_per_tract: BTreeMap<String, u64>,
    pub localized_per_tract: BTreeMap<String, u64>,
}

/// A generated city: tract boundaries, the message corpus, and ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct CityFixture {
    pub tracts: Vec<Tract>,
    pub messages: Vec<GeoMessage>,
    pub truth: CityTruth,
}

/// Paths written by [`CityFixture::write_to_dir`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CityPaths {
    pub messages: PathBuf,
    pub tracts: PathBuf,
    pub truth: PathBuf,
}

impl CityFixture {
    /// Writes `messages.jsonl`, `tracts.geojson`, and the `truth.json`
    /// sidecar into `dir` (which must exist).
    pub fn write_to_dir(&self, dir: &Path) -> Result<CityPaths> {
        let paths = CityPaths {
            messages: dir.join("messages.jsonl"),
            tracts: dir.join("tracts.geojson"),
            truth: dir.join("truth.json"),
        };
        let file = std::fs::File::create(&paths.messages)
            .map_err(|e| Error::io(&paths.messages, e))?;
        write_messages(std::io::BufWriter::new(file), &self.messages)
            .map_err(|e| Error::io(&paths.messages, e))?;

        let collection =
            crate::ingest::tracts_to_feature_collection(&self.tracts, demographic_properties);
        std::fs::write(&paths.tracts, collection.to_string())
            .map_err(|e| Error::io(&paths.tracts, e))?;

        let truth = serde_json::to_string_pretty(&self.truth)
            .map_err(|e| Error::internal(format!("serializing ground truth: {e}")))?;
        std::fs::write(&paths.truth, truth).map_err(|e| Error::io(&paths.truth, e))?;
        Ok(paths)
    }
}

/// Demographic fields as GeoJSON feature properties (missing ones omitted).
pub fn demographic_properties(tract: &Tract) -> Vec<(String, serde_json::Value)> {
    let d = &tract.demographics;
    [
        ("median_age", d.median_age),
        ("hispanic_pop", d.hispanic_pop),
        ("non_hispanic_pop", d.non_hispanic_pop),
        ("pct_employed", d.pct_employed),
        ("pct_bachelors", d.pct_bachelors),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), serde_json::Value::from(v))))
    .collect()
}

/// Rotating cursors into the word pools, so every run with the same seed
/// emits the same corpus, message by message.
struct CityGen {
    rng: ChaCha8Rng,
    seq: u64,
    neutral: usize,
    upbeat: usize,
    negative: usize,
    positive: usize,
    venue: usize,
    city: usize,
    checkin_seq: u64,
}

impl CityGen {
    fn next_neutral(&mut self) -> &'static str {
        let w = NEUTRAL_POOL[self.neutral % NEUTRAL_POOL.len()];
        self.neutral += 1;
        w
    }

    fn next_upbeat(&mut self) -> &'static str {
        let w = UPBEAT_POOL[self.upbeat % UPBEAT_POOL.len()];
        self.upbeat += 1;
        w
    }

    fn message(&mut self, user_id: &str, at: LatLon, text: String) -> GeoMessage {
        let seq = self.seq;
        self.seq += 1;
        GeoMessage {
            message_id: format!("m{seq:06}"),
            user_id: user_id.to_string(),
            timestamp: Utc.with_ymd_and_hms(2013, 4, 1, 0, 0, 0).unwrap()
                + Duration::seconds(seq as i64),
            lat: at.lat,
            lon: at.lon,
            text,
        }
    }
}

/// Sanity-checks that the word pools still have the lexicon relationships
/// the planted effects rely on, then returns the mean valence of each of
/// the neutral and upbeat pools.
fn pool_means() -> Result<(f64, f64)> {
    let vad = VadLexicon::bundled();
    let sent = SentimentLexicon::bundled();
    let mean_of = |pool: &[&str], name: &str| -> Result<f64> {
        let mut sum = 0.0;
        for w in pool {
            let entry = vad.entries.get(*w).ok_or_else(|| {
                Error::internal(format!("fixture {name} pool word {w:?} missing from affect lexicon"))
            })?;
            sum += entry.valence;
        }
        Ok(sum / pool.len() as f64)
    };
    let neutral_mean = mean_of(&NEUTRAL_POOL, "neutral")?;
    let upbeat_mean = mean_of(&UPBEAT_POOL, "upbeat")?;
    for w in NEUTRAL_POOL {
        if sent.term_strengths.contains_key(w) {
            return Err(Error::internal(format!(
                "fixture neutral pool word {w:?} carries sentiment strength"
            )));
        }
    }
    for w in NEGATIVE_POOL.iter().chain(&POSITIVE_POOL) {
        if vad.entries.contains_key(*w) {
            return Err(Error::internal(format!(
                "fixture strength pool word {w:?} leaks into the affect lexicon"
            )));
        }
        if !sent.term_strengths.contains_key(*w) {
            return Err(Error::internal(format!(
                "fixture strength pool word {w:?} missing from sentiment lexicon"
            )));
        }
    }
    Ok((neutral_mean, upbeat_mean))
}

/// Generates the synthetic city.
///
/// Non-venue tracts receive plain at-home messages with a 20% negative-word
/// rate. Venue tracts receive fewer at-home messages, an 8% negative rate,
/// an upbeat-word mix in 20% of messages (the valence plant), check-ins at
/// the venue, and one displaced far-east message for every at-home one (the
/// mobility plant: each venue resident's point cloud splits evenly between
/// home and a point `displaced_distance_m` away, so their radius of
/// gyration is half that distance). Displaced points fall outside the grid
/// and stay unlocalized. Every planted quantity is recorded in the truth.
pub fn synthetic_city(params: &CityParams) -> Result<CityFixture> {
    if params.grid.with_holes {
        return Err(Error::Config {
            reason: "the synthetic city needs a hole-free grid for exact ground truth".into(),
        });
    }
    if params.residents_per_tract == 0 || params.baseline_messages_per_tract == 0 {
        return Err(Error::Config {
            reason: "the synthetic city needs at least one resident and message per tract".into(),
        });
    }
    if params.low_tier_count > params.venue_tract_count {
        return Err(Error::Config {
            reason: "low check-in tier cannot exceed the venue tract count".into(),
        });
    }
    let tract_count = params.grid.tract_count();
    let venue_stride = 9;
    if params.venue_tract_count > 0
        && (params.venue_tract_count - 1) * venue_stride + 4 >= tract_count
    {
        return Err(Error::Config {
            reason: format!(
                "{} venue tracts do not fit a {}-tract grid",
                params.venue_tract_count, tract_count
            ),
        });
    }
    let (neutral_mean, upbeat_mean) = pool_means()?;

    let tracts = grid_tracts(&params.grid);
    let venue_index: BTreeMap<usize, u64> = (0..params.venue_tract_count)
        .map(|i| {
            let checkins = if i < params.low_tier_count {
                1 + (i as u64) % 2
            } else {
                3 + ((i - params.low_tier_count) as u64) % 9
            };
            (i * venue_stride + 4, checkins)
        })
        .collect();

    let mut gen = CityGen {
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        seq: 0,
        neutral: 0,
        upbeat: 0,
        negative: 0,
        positive: 0,
        venue: 0,
        city: 0,
        checkin_seq: 0,
    };
    let mut messages = Vec::new();
    let mut checkins_per_tract = BTreeMap::new();
    let mut localized_per_tract = BTreeMap::new();
    let mut n_checkins = 0u64;
    let mut n_unlocalized = 0u64;

    for idx in 0..tract_count {
        let tract_id = params.grid.tract_id(idx);
        let (lon0, lat0) = params.grid.cell_origin(idx);
        let cell = params.grid.cell_deg;
        let center = params.grid.cell_center(idx);
        let residents: Vec<String> = (0..params.residents_per_tract)
            .map(|k| format!("u{idx:04}_{k}"))
            .collect();
        // Safe interior point: jitter within the middle 40% of the cell.
        let home_point = |gen: &mut CityGen| -> LatLon {
            LatLon::new(
                lat0 + cell * gen.rng.random_range(0.3..0.7),
                lon0 + cell * gen.rng.random_range(0.3..0.7),
            )
        };
        let venue_checkins = venue_index.get(&idx).copied();
        let is_venue = venue_checkins.is_some();
        let n_home = if is_venue {
            params.venue_home_messages_per_tract
        } else {
            params.baseline_messages_per_tract
        };
        // Per-user at-home point counts, for the displaced mirror below.
        let mut home_counts = vec![0usize; residents.len()];

        for k in 0..n_home {
            let user = k % residents.len();
            home_counts[user] += 1;
            let mut words: Vec<&str> = Vec::with_capacity(4);
            if is_venue && k % 5 == 0 {
                // Valence plant: half neutral, half upbeat.
                words.push(gen.next_neutral());
                words.push(gen.next_neutral());
                words.push(gen.next_upbeat());
                words.push(gen.next_upbeat());
            } else {
                words.push(gen.next_neutral());
                words.push(gen.next_neutral());
                words.push(gen.next_neutral());
            }
            let negative_slot = if is_venue {
                k % 25 == 3 || k % 25 == 16
            } else {
                k % 5 == 3
            };
            if negative_slot {
                words.push(NEGATIVE_POOL[gen.negative % NEGATIVE_POOL.len()]);
                gen.negative += 1;
            }
            let positive_slot = if is_venue {
                k % 25 == 7 || k % 25 == 17
            } else {
                k % 10 == 7
            };
            if positive_slot {
                words.push(POSITIVE_POOL[gen.positive % POSITIVE_POOL.len()]);
                gen.positive += 1;
            }
            let at = home_point(&mut gen);
            let msg = gen.message(&residents[user], at, words.join(" "));
            messages.push(msg);
        }
        *localized_per_tract.entry(tract_id.clone()).or_insert(0u64) += n_home as u64;

        if let Some(count) = venue_checkins {
            for c in 0..count {
                let user = (c as usize) % residents.len();
                home_counts[user] += 1;
                let venue = VENUE_POOL[gen.venue % VENUE_POOL.len()];
                gen.venue += 1;
                let city = CITY_POOL[gen.city % CITY_POOL.len()];
                gen.city += 1;
                let code = format!("c{:07}", gen.checkin_seq);
                gen.checkin_seq += 1;
                let text = match c % 3 {
                    0 => format!("I'm at {venue} ({city}, CA) http://t.co/{code}"),
                    1 => format!("I'm at @{} {venue} in {city}, CA https://t.co/{code}",
                        venue.to_lowercase()),
                    _ => format!(
                        "I'm at {venue} - @{} ({city}, CA) http://t.co/{code}",
                        venue.to_lowercase()
                    ),
                };
                let at = home_point(&mut gen);
                let msg = gen.message(&residents[user], at, text);
                messages.push(msg);
            }
            n_checkins += count;
            *localized_per_tract.get_mut(&tract_id).expect("entry above") += count;
            checkins_per_tract.insert(tract_id.clone(), count);

            // Mobility plant: one displaced message per at-home message,
            // all at the same far-east anchor, so each resident's points
            // split exactly half home / half displaced.
            let displaced = LatLon::new(
                center.lat,
                center.lon + eastward_offset_deg(center.lat, params.displaced_distance_m),
            );
            for (user, &home_count) in home_counts.iter().enumerate() {
                for _ in 0..home_count {
                    let text = format!(
                        "{} {} {}",
                        gen.next_neutral(),
                        gen.next_neutral(),
                        gen.next_neutral()
                    );
                    let msg = gen.message(&residents[user], displaced, text);
                    messages.push(msg);
                    n_unlocalized += 1;
                }
            }
        }
    }

    let n_messages = messages.len() as u64;
    let n_localized: u64 = localized_per_tract.values().sum();
    let truth = CityTruth {
        seed: params.seed,
        n_messages,
        n_localized,
        n_unlocalized,
        n_checkins,
        n_users: (tract_count * params.residents_per_tract) as u64,
        n_tracts: tract_count as u64,
        users_per_tract: params.residents_per_tract as u64,
        cohort_all: tract_count as u64,
        cohort_with_checkins: params.venue_tract_count as u64,
        cohort_above_threshold: (params.venue_tract_count - params.low_tier_count) as u64,
        threshold: 3,
        vad_covered: n_messages - n_checkins,
        // 20% of venue at-home messages swap to half-upbeat wording, which
        // lifts those messages' valence by (upbeat - neutral) / 2.
        expected_valence_shift: 0.2 * (upbeat_mean - neutral_mean) / 2.0,
        expected_rg_shift_m: params.displaced_distance_m / 2.0,
        venue_tracts: venue_index
            .keys()
            .map(|&idx| params.grid.tract_id(idx))
            .collect(),
        checkins_per_tract,
        localized_per_tract,
    };
    Ok(CityFixture {
        tracts,
        messages,
        truth,
    })
}

/// A 1,000-line message corpus where 37 known lines are malformed.
///
/// Returns the raw JSONL text and the ingest statistics a lenient read
/// must produce.
pub fn corrupt_corpus() -> (String, IngestStats) {
    let corrupt_at: BTreeSet<usize> = (0..37).map(|i| 11 + 27 * i).collect();
    let mut lines = Vec::with_capacity(1000);
    for i in 0..1000usize {
        let ts = Utc.with_ymd_and_hms(2013, 5, 1, 0, 0, 0).unwrap() + Duration::seconds(i as i64);
        let good = serde_json::json!({
            "message_id": format!("c{i:04}"),
            "user_id": format!("u{:03}", i % 200),
            "timestamp": ts.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            "lat": 34.0 + (i % 50) as f64 * 0.001,
            "lon": -118.3 + (i % 50) as f64 * 0.001,
            "text": format!("{} {}", NEUTRAL_POOL[i % NEUTRAL_POOL.len()],
                NEUTRAL_POOL[(i + 1) % NEUTRAL_POOL.len()]),
        });
        if corrupt_at.contains(&i) {
            let mut bad = good.clone();
            match i % 6 {
                0 => {
                    // Truncated JSON.
                    let s = good.to_string();
                    lines.push(s[..s.len() / 2].to_string());
                    continue;
                }
                1 => {
                    bad.as_object_mut().unwrap().remove("text");
                }
                2 => bad["lat"] = serde_json::json!(95.0),
                3 => bad["timestamp"] = serde_json::json!("yesterday"),
                4 => bad["message_id"] = serde_json::json!(""),
                _ => bad["lon"] = serde_json::json!(200.0),
            }
            lines.push(bad.to_string());
        } else {
            lines.push(good.to_string());
        }
    }
    let expected = IngestStats {
        total_lines: 1000,
        accepted: 963,
        rejected: 37,
        duplicates: 0,
    };
    (lines.join("\n") + "\n", expected)
}

/// A 1,000-text corpus where exactly 820 texts contain an affect-lexicon
/// term. Returns the texts and the recorded coverage fraction.
pub fn coverage_corpus() -> (Vec<String>, f64) {
    let mut covered = 0usize;
    let texts: Vec<String> = (0..1000usize)
        .map(|i| {
            if i % 50 < 41 {
                covered += 1;
                format!(
                    "{} {} {}",
                    NEUTRAL_POOL[i % NEUTRAL_POOL.len()],
                    NONSENSE_POOL[i % NONSENSE_POOL.len()],
                    NEUTRAL_POOL[(i + 5) % NEUTRAL_POOL.len()]
                )
            } else {
                format!(
                    "{} {} {}",
                    NONSENSE_POOL[i % NONSENSE_POOL.len()],
                    NONSENSE_POOL[(i + 1) % NONSENSE_POOL.len()],
                    NONSENSE_POOL[(i + 2) % NONSENSE_POOL.len()]
                )
            }
        })
        .collect();
    let fraction = covered as f64 / texts.len() as f64;
    (texts, fraction)
}

/// Standard-normal pairs with a planted correlation coefficient.
pub fn correlated_pairs(n: usize, target_r: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let residual = (1.0 - target_r * target_r).sqrt();
    (0..n)
        .map(|_| {
            let x: f64 = rng.sample(rand_distr::StandardNormal);
            let e: f64 = rng.sample(rand_distr::StandardNormal);
            (x, target_r * x + residual * e)
        })
        .collect()
}

/// Random users with 1–`max_points` uniform points inside a box, for
/// mobility oracle tests. Returns `(user_id, points)` pairs.
pub fn random_point_users(
    n_users: usize,
    max_points: usize,
    south_west: LatLon,
    span_deg: f64,
    seed: u64,
) -> Vec<(String, Vec<LatLon>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_users)
        .map(|u| {
            let n = rng.random_range(1..=max_points);
            let points = (0..n)
                .map(|_| {
                    LatLon::new(
                        south_west.lat + rng.random_range(0.0..span_deg),
                        south_west.lon + rng.random_range(0.0..span_deg),
                    )
                })
                .collect();
            (format!("user{u:04}"), points)
        })
        .collect()
}

/// Uniform random probe points over the grid's bounding box, expanded a
/// little so some probes fall outside every tract.
pub fn grid_probe_points(spec: &GridSpec, n: usize, seed: u64) -> Vec<LatLon> {
    let [min_lon, min_lat, max_lon, max_lat] = spec.bounds();
    let pad = 2.0 * spec.cell_deg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            LatLon::new(
                rng.random_range(min_lat - pad..max_lat + pad),
                rng.random_range(min_lon - pad..max_lon + pad),
            )
        })
        .collect()
}

/// Deterministic points hugging the awkward parts of the grid: cell
/// corners, edge midpoints, and (on holed cells) hole and island edges and
/// their immediate surroundings. Cycles through cells until `n` points.
pub fn grid_edge_points(spec: &GridSpec, n: usize) -> Vec<LatLon> {
    let mut points = Vec::with_capacity(n);
    let eps = spec.cell_deg * 1e-4;
    let mut idx = 0usize;
    while points.len() < n {
        let cell = idx % spec.tract_count();
        idx += 1;
        let (lon0, lat0) = spec.cell_origin(cell);
        let c = spec.cell_deg;
        points.push(LatLon::new(lat0, lon0)); // corner
        points.push(LatLon::new(lat0, lon0 + c / 2.0)); // south edge midpoint
        points.push(LatLon::new(lat0 + c / 2.0, lon0)); // west edge midpoint
        points.push(LatLon::new(lat0 + eps, lon0 + eps)); // just inside
        if spec.is_holed(cell) {
            let (hlon, hlat, hside) = hole_extent(spec, cell);
            points.push(LatLon::new(hlat, hlon)); // hole corner (on boundary)
            points.push(LatLon::new(hlat + eps, hlon + eps)); // inside hole
            points.push(LatLon::new(hlat - eps, hlon - eps)); // just outside hole
            let (ilon, ilat, iside) = island_extent(spec, cell);
            points.push(LatLon::new(ilat, ilon)); // island corner
            points.push(LatLon::new(ilat + eps, ilon + eps)); // inside island
            points.push(LatLon::new(ilat + iside / 2.0, ilon + iside / 2.0)); // island center
            points.push(LatLon::new(hlat + hside / 2.0, hlon + eps)); // in hole near edge
        }
    }
    points.truncate(n);
    points
}
