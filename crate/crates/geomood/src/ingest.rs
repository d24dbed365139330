//! Input data model and loaders: message corpora, tract boundary files,
//! and the two emotion lexicons.
//!
//! Loaders validate aggressively and report failures with file / line
//! positions. Message ingest supports a lenient mode (count and skip bad
//! lines) and a strict mode (first bad line aborts); both are deterministic.

use crate::error::Error;
use crate::geo::{Geometry, LatLon, Polygon, Ring};
use crate::Result;
use chrono::{DateTime, SecondsFormat, Utc};
use serde::Deserialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

/// One geo-tagged message.
#[derive(Debug, Clone, PartialEq)]
pub struct GeoMessage {
    pub message_id: String,
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
    pub text: String,
}

impl GeoMessage {
    pub fn position(&self) -> LatLon {
        LatLon::new(self.lat, self.lon)
    }
}

/// Outcome counters for one ingest run.
///
/// `accepted + rejected + duplicates == total_lines` always holds; blank
/// lines are ignored entirely and never counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IngestStats {
    pub total_lines: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub duplicates: u64,
}

#[derive(Deserialize)]
struct RawMessage {
    message_id: String,
    user_id: String,
    timestamp: String,
    lat: f64,
    lon: f64,
    text: String,
}

fn parse_message_line(line: &str) -> std::result::Result<GeoMessage, String> {
    let raw: RawMessage =
        serde_json::from_str(line).map_err(|e| format!("invalid message object: {e}"))?;
    let timestamp = DateTime::parse_from_rfc3339(&raw.timestamp)
        .map_err(|e| format!("invalid timestamp {:?}: {e}", raw.timestamp))?
        .with_timezone(&Utc);
    if !raw.lat.is_finite() || !(-90.0..=90.0).contains(&raw.lat) {
        return Err(format!("latitude {} out of range [-90, 90]", raw.lat));
    }
    if !raw.lon.is_finite() || !(-180.0..=180.0).contains(&raw.lon) {
        return Err(format!("longitude {} out of range [-180, 180]", raw.lon));
    }
    if raw.message_id.is_empty() {
        return Err("empty message_id".into());
    }
    if raw.user_id.is_empty() {
        return Err("empty user_id".into());
    }
    Ok(GeoMessage {
        message_id: raw.message_id,
        user_id: raw.user_id,
        timestamp,
        lat: raw.lat,
        lon: raw.lon,
        text: raw.text,
    })
}

/// Reads a JSONL corpus from any reader.
///
/// In lenient mode malformed lines are counted in
/// [`IngestStats::rejected`] and skipped; in strict mode the first
/// malformed line aborts with its line number. A repeated `message_id` is
/// well-formed data, so in both modes the first occurrence wins and the
/// repeat is counted in [`IngestStats::duplicates`].
pub fn read_messages<R: Read>(
    reader: R,
    origin: &Path,
    strict: bool,
) -> Result<(Vec<GeoMessage>, IngestStats)> {
    let mut stats = IngestStats::default();
    let mut messages = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        if line.trim().is_empty() {
            continue;
        }
        stats.total_lines += 1;
        match parse_message_line(&line) {
            Ok(msg) => {
                if seen_ids.insert(msg.message_id.clone()) {
                    stats.accepted += 1;
                    messages.push(msg);
                } else {
                    stats.duplicates += 1;
                }
            }
            Err(reason) => {
                if strict {
                    return Err(Error::MalformedLine {
                        path: origin.to_path_buf(),
                        line: line_no,
                        reason,
                    });
                }
                stats.rejected += 1;
            }
        }
    }
    Ok((messages, stats))
}

/// [`read_messages`] over a file path.
pub fn load_messages(path: &Path, strict: bool) -> Result<(Vec<GeoMessage>, IngestStats)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_messages(file, path, strict)
}

/// Serializes one message as a canonical single-line JSON object.
pub fn message_to_json(msg: &GeoMessage) -> String {
    serde_json::json!({
        "message_id": msg.message_id,
        "user_id": msg.user_id,
        "timestamp": msg.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
        "lat": msg.lat,
        "lon": msg.lon,
        "text": msg.text,
    })
    .to_string()
}

/// Writes a corpus as JSONL; a later [`read_messages`] round-trips it.
pub fn write_messages<W: Write>(mut out: W, messages: &[GeoMessage]) -> std::io::Result<()> {
    for msg in messages {
        writeln!(out, "{}", message_to_json(msg))?;
    }
    Ok(())
}

/// Per-tract census attributes; `None` marks a value missing at the source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize, serde::Serialize)]
pub struct Demographics {
    pub median_age: Option<f64>,
    pub hispanic_pop: Option<f64>,
    pub non_hispanic_pop: Option<f64>,
    pub pct_employed: Option<f64>,
    pub pct_bachelors: Option<f64>,
}

impl Demographics {
    fn validate(&self) -> std::result::Result<(), String> {
        let non_negative = [
            ("median_age", self.median_age),
            ("hispanic_pop", self.hispanic_pop),
            ("non_hispanic_pop", self.non_hispanic_pop),
        ];
        for (name, v) in non_negative {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(format!("{name} must be non-negative, got {v}"));
                }
            }
        }
        let percentages = [
            ("pct_employed", self.pct_employed),
            ("pct_bachelors", self.pct_bachelors),
        ];
        for (name, v) in percentages {
            if let Some(v) = v {
                if !v.is_finite() || !(0.0..=100.0).contains(&v) {
                    return Err(format!("{name} must be within [0, 100], got {v}"));
                }
            }
        }
        Ok(())
    }
}

/// One census tract: identifier, footprint, attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tract {
    pub tract_id: String,
    pub geometry: Geometry,
    pub demographics: Demographics,
}

/// A loaded boundary file: valid tracts plus warnings for skipped features.
#[derive(Debug, Clone, PartialEq)]
pub struct TractSet {
    pub tracts: Vec<Tract>,
    pub warnings: Vec<String>,
}

impl TractSet {
    /// `(tract_id, geometry)` pairs ready for index construction.
    pub fn geometries(&self) -> Vec<(String, Geometry)> {
        self.tracts
            .iter()
            .map(|t| (t.tract_id.clone(), t.geometry.clone()))
            .collect()
    }

    /// Demographics keyed by tract id.
    pub fn demographics_by_id(&self) -> BTreeMap<String, Demographics> {
        self.tracts
            .iter()
            .map(|t| (t.tract_id.clone(), t.demographics))
            .collect()
    }
}

#[derive(Deserialize)]
struct RawFeatureCollection {
    #[serde(rename = "type")]
    kind: String,
    features: Vec<RawFeature>,
}

#[derive(Deserialize)]
struct RawFeature {
    properties: RawProperties,
    geometry: Option<RawGeometry>,
}

#[derive(Deserialize)]
struct RawProperties {
    tract_id: String,
    #[serde(flatten)]
    demographics: Demographics,
}

#[derive(Deserialize)]
struct RawGeometry {
    #[serde(rename = "type")]
    kind: String,
    coordinates: serde_json::Value,
}

fn rings_from_value(value: &serde_json::Value) -> std::result::Result<Vec<Ring>, String> {
    let raw: Vec<Vec<[f64; 2]>> =
        serde_json::from_value(value.clone()).map_err(|e| format!("bad polygon rings: {e}"))?;
    if raw.is_empty() {
        return Err("polygon has no rings".into());
    }
    raw.into_iter()
        .enumerate()
        .map(|(i, pts)| {
            for p in &pts {
                if !p[0].is_finite() || !p[1].is_finite() {
                    return Err(format!("ring {i} has a non-finite coordinate"));
                }
            }
            Ring::closed(pts).ok_or_else(|| format!("ring {i} has fewer than 3 distinct vertices"))
        })
        .collect()
}

fn geometry_from_raw(raw: &RawGeometry) -> std::result::Result<Geometry, String> {
    match raw.kind.as_str() {
        "Polygon" => {
            let rings = rings_from_value(&raw.coordinates)?;
            Ok(Geometry {
                polygons: vec![Polygon { rings }],
            })
        }
        "MultiPolygon" => {
            let parts: Vec<serde_json::Value> = serde_json::from_value(raw.coordinates.clone())
                .map_err(|e| format!("bad multipolygon: {e}"))?;
            if parts.is_empty() {
                return Err("multipolygon has no parts".into());
            }
            let polygons = parts
                .iter()
                .map(|part| rings_from_value(part).map(|rings| Polygon { rings }))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(Geometry { polygons })
        }
        other => Err(format!("unsupported geometry type {other:?}")),
    }
}

/// Parses a feature-collection boundary document.
///
/// Features with missing or non-polygonal geometry are skipped with a
/// warning; a duplicated `tract_id` or an out-of-range demographic value is
/// fatal.
pub fn parse_tracts(text: &str, origin: &Path) -> Result<TractSet> {
    let collection: RawFeatureCollection =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput {
            path: Some(origin.to_path_buf()),
            reason: format!("not a feature collection: {e}"),
        })?;
    if collection.kind != "FeatureCollection" {
        return Err(Error::InvalidInput {
            path: Some(origin.to_path_buf()),
            reason: format!("expected FeatureCollection, got {:?}", collection.kind),
        });
    }
    let mut tracts = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    for feature in &collection.features {
        let id = &feature.properties.tract_id;
        if id.is_empty() {
            return Err(Error::InvalidInput {
                path: Some(origin.to_path_buf()),
                reason: "feature with empty tract_id".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateTract {
                tract_id: id.clone(),
            });
        }
        feature
            .properties
            .demographics
            .validate()
            .map_err(|reason| Error::InvalidInput {
                path: Some(origin.to_path_buf()),
                reason: format!("tract {id}: {reason}"),
            })?;
        let raw_geometry = match &feature.geometry {
            Some(g) => g,
            None => {
                warnings.push(format!("tract {id}: missing geometry, skipped"));
                continue;
            }
        };
        match geometry_from_raw(raw_geometry) {
            Ok(geometry) => tracts.push(Tract {
                tract_id: id.clone(),
                geometry,
                demographics: feature.properties.demographics,
            }),
            Err(reason) => warnings.push(format!("tract {id}: {reason}, skipped")),
        }
    }
    Ok(TractSet { tracts, warnings })
}

/// [`parse_tracts`] over a file path.
pub fn load_tracts(path: &Path) -> Result<TractSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tracts(&text, path)
}

fn json_ring(ring: &Ring) -> serde_json::Value {
    serde_json::Value::Array(
        ring.0
            .iter()
            .map(|p| serde_json::json!([p[0], p[1]]))
            .collect(),
    )
}

/// Serializes a geometry back to its feature-collection form.
pub fn geometry_to_json(geometry: &Geometry) -> serde_json::Value {
    if geometry.polygons.len() == 1 {
        serde_json::json!({
            "type": "Polygon",
            "coordinates": geometry.polygons[0].rings.iter().map(json_ring).collect::<Vec<_>>(),
        })
    } else {
        serde_json::json!({
            "type": "MultiPolygon",
            "coordinates": geometry
                .polygons
                .iter()
                .map(|poly| poly.rings.iter().map(json_ring).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Serializes tracts as a feature collection, with optional extra
/// per-feature properties supplied by `extra` (merged after the census
/// attributes).
pub fn tracts_to_feature_collection(
    tracts: &[Tract],
    mut extra: impl FnMut(&Tract) -> Vec<(String, serde_json::Value)>,
) -> serde_json::Value {
    let features: Vec<serde_json::Value> = tracts
        .iter()
        .map(|t| {
            let mut properties = serde_json::Map::new();
            properties.insert("tract_id".into(), serde_json::json!(t.tract_id));
            let demo = serde_json::to_value(t.demographics).expect("demographics serialize");
            if let serde_json::Value::Object(map) = demo {
                properties.extend(map);
            }
            for (k, v) in extra(t) {
                properties.insert(k, v);
            }
            serde_json::json!({
                "type": "Feature",
                "properties": serde_json::Value::Object(properties),
                "geometry": geometry_to_json(&t.geometry),
            })
        })
        .collect();
    serde_json::json!({ "type": "FeatureCollection", "features": features })
}

const STRENGTH_RANGE: std::ops::RangeInclusive<i8> = -5..=5;

fn parse_strength(raw: &str, allow_zero: bool) -> std::result::Result<i8, String> {
    let value: i8 = raw
        .trim()
        .parse()
        .map_err(|_| format!("not an integer strength: {raw:?}"))?;
    if !STRENGTH_RANGE.contains(&value) || (!allow_zero && value == 0) {
        return Err(format!("strength {value} outside [-5,-1] or [1,5]"));
    }
    Ok(value)
}

/// The dual-polarity strength lexicon driving [`crate::sentiment::score_sentistrength`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    /// Word → signed strength in `[-5,-1] ∪ [1,5]`.
    pub term_strengths: HashMap<String, i8>,
    /// Word → magnitude offset applied to an immediately following scored term.
    pub boosters: HashMap<String, i8>,
    /// Words that invert/dampen a scored term within two positions.
    pub negators: HashSet<String>,
    /// Emoticon surface → signed strength.
    pub emoticons: HashMap<String, i8>,
    /// Multi-word phrase (single-space separated) → signed strength.
    pub idioms: HashMap<String, i8>,
}

impl SentimentLexicon {
    /// Enforces cross-section invariants.
    pub fn validate(&self) -> Result<()> {
        for surface in self.emoticons.keys() {
            if self.term_strengths.contains_key(surface) {
                return Err(Error::InvalidInput {
                    path: None,
                    reason: format!("{surface:?} appears in both [terms] and [emoticons]"),
                });
            }
        }
        Ok(())
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> SentimentLexicon {
        parse_sentiment_lexicon(BUNDLED_SENTIMENT_SOURCE, Path::new("<bundled sentiment.lex>"))
            .expect("bundled sentiment lexicon is valid")
    }
}

/// Raw text of the bundled sentiment lexicon (for digests and tooling).
pub const BUNDLED_SENTIMENT_SOURCE: &str = include_str!("../data/sentiment.lex");
/// Raw text of the bundled affect-norm lexicon.
pub const BUNDLED_VAD_SOURCE: &str = include_str!("../data/vad.lex");
/// Raw text of the bundled stopword list.
pub const BUNDLED_STOPWORDS_SOURCE: &str = include_str!("../data/stopwords.txt");

/// Parses the sectioned sentiment-lexicon format.
///
/// Sections `[terms]`, `[boosters]`, `[negators]`, `[emoticons]`,
/// `[idioms]`; entries are `term<TAB>integer` (negators: bare term). Blank
/// lines and `#` comments are ignored. Strengths outside the legal range or
/// a term listed as both word and emoticon are errors.
pub fn parse_sentiment_lexicon(text: &str, origin: &Path) -> Result<SentimentLexicon> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Terms,
        Boosters,
        Negators,
        Emoticons,
        Idioms,
    }
    let mut section = Section::None;
    let mut lexicon = SentimentLexicon::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let fail = |reason: String| Error::MalformedLine {
            path: origin.to_path_buf(),
            line: line_no,
            reason,
        };
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        section = match line {
            "[terms]" => Section::Terms,
            "[boosters]" => Section::Boosters,
            "[negators]" => Section::Negators,
            "[emoticons]" => Section::Emoticons,
            "[idioms]" => Section::Idioms,
            _ if line.starts_with('[') => {
                return Err(fail(format!("unknown section {line:?}")));
            }
            _ => {
                let (term, strength) = match section {
                    Section::None => return Err(fail("entry before any section header".into())),
                    Section::Negators => {
                        lexicon.negators.insert(line.trim().to_lowercase());
                        continue;
                    }
                    _ => {
                        let (term, raw) = line
                            .split_once('\t')
                            .ok_or_else(|| fail("expected term<TAB>strength".into()))?;
                        let term = term.trim();
                        if term.is_empty() {
                            return Err(fail("empty term".into()));
                        }
                        let allow_zero = false;
                        (term, parse_strength(raw, allow_zero).map_err(fail)?)
                    }
                };
                match section {
                    Section::Terms => {
                        lexicon.term_strengths.insert(term.to_lowercase(), strength);
                    }
                    Section::Boosters => {
                        lexicon.boosters.insert(term.to_lowercase(), strength);
                    }
                    Section::Emoticons => {
                        lexicon.emoticons.insert(term.to_string(), strength);
                    }
                    Section::Idioms => {
                        let phrase = term.split_whitespace().collect::<Vec<_>>().join(" ");
                        if !phrase.contains(' ') {
                            return Err(fail(format!(
                                "idiom {phrase:?} must have at least two words"
                            )));
                        }
                        lexicon.idioms.insert(phrase.to_lowercase(), strength);
                    }
                    _ => unreachable!(),
                }
                continue;
            }
        };
    }
    lexicon.validate()?;
    Ok(lexicon)
}

/// [`parse_sentiment_lexicon`] over a file path.
pub fn load_sentiment_lexicon(path: &Path) -> Result<SentimentLexicon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sentiment_lexicon(&text, path)
}

/// One lemma's affect norms on the 1..9 scale (5 is neutral).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vad {
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
}

/// Lemma → valence/arousal/dominance norms.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VadLexicon {
    pub entries: HashMap<String, Vad>,
}

impl VadLexicon {
    pub fn bundled() -> VadLexicon {
        parse_vad_lexicon(BUNDLED_VAD_SOURCE, Path::new("<bundled vad.lex>"))
            .expect("bundled VAD lexicon is valid")
    }
}

/// Parses `lemma<TAB>v<TAB>a<TAB>d` lines; each value must lie in `[1, 9]`.
pub fn parse_vad_lexicon(text: &str, origin: &Path) -> Result<VadLexicon> {
    let mut entries = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let fail = |reason: String| Error::MalformedLine {
            path: origin.to_path_buf(),
            line: line_no,
            reason,
        };
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(fail(format!(
                "expected lemma<TAB>v<TAB>a<TAB>d, got {} fields",
                fields.len()
            )));
        }
        let lemma = fields[0].trim().to_lowercase();
        if lemma.is_empty() {
            return Err(fail("empty lemma".into()));
        }
        let mut values = [0.0f64; 3];
        for (slot, raw) in values.iter_mut().zip(&fields[1..]) {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| fail(format!("not a number: {raw:?}")))?;
            if !v.is_finite() || !(1.0..=9.0).contains(&v) {
                return Err(fail(format!("value {v} outside [1, 9]")));
            }
            *slot = v;
        }
        entries.insert(
            lemma,
            Vad {
                valence: values[0],
                arousal: values[1],
                dominance: values[2],
            },
        );
    }
    Ok(VadLexicon { entries })
}

/// [`parse_vad_lexicon`] over a file path.
pub fn load_vad_lexicon(path: &Path) -> Result<VadLexicon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vad_lexicon(&text, path)
}

/// Parses a stopword list: one lowercase word per line, `#` comments allowed.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

/// The stopword list shipped with the crate.
pub fn bundled_stopwords() -> HashSet<String> {
    parse_stopwords(BUNDLED_STOPWORDS_SOURCE)
}

/// Loads stopwords from a file.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// Convenience: the path-or-bundled pattern used by the CLI.
pub fn sentiment_lexicon_from(path: Option<&PathBuf>) -> Result<SentimentLexicon> {
    match path {
        Some(p) => load_sentiment_lexicon(p),
        None => Ok(SentimentLexicon::bundled()),
    }
}

/// Convenience: the path-or-bundled pattern used by the CLI.
pub fn vad_lexicon_from(path: Option<&PathBuf>) -> Result<VadLexicon> {
    match path {
        Some(p) => load_vad_lexicon(p),
        None => Ok(VadLexicon::bundled()),
    }
}

/// Convenience: the path-or-bundled pattern used by the CLI.
pub fn stopwords_from(path: Option<&PathBuf>) -> Result<HashSet<String>> {
    match path {
        Some(p) => load_stopwords(p),
        None => Ok(bundled_stopwords()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use std::io::Cursor;

    fn origin() -> PathBuf {
        PathBuf::from("test.jsonl")
    }

    fn valid_line(id: &str) -> String {
        format!(
            "{{\"message_id\":\"{id}\",\"user_id\":\"u1\",\"timestamp\":\"2014-07-01T12:00:00Z\",\
             \"lat\":34.05,\"lon\":-118.24,\"text\":\"hello world\"}}"
        )
    }

    #[test]
    fn accepts_valid_lines_and_parses_fields() {
        let input = valid_line("m1");
        let (msgs, stats) = read_messages(Cursor::new(input), &origin(), true).unwrap();
        assert_eq!(stats.accepted, 1);
        let m = &msgs[0];
        assert_eq!(m.message_id, "m1");
        assert_eq!(m.user_id, "u1");
        assert_eq!(m.lat, 34.05);
        assert_eq!(m.lon, -118.24);
        assert_eq!(m.text, "hello world");
        let expected = Utc.with_ymd_and_hms(2014, 7, 1, 12, 0, 0).unwrap();
        assert_eq!(m.timestamp, expected);
    }

    #[test]
    fn timestamp_offsets_normalize_to_utc() {
        let line = valid_line("m1").replace("12:00:00Z", "05:00:00-07:00");
        let (msgs, _) = read_messages(Cursor::new(line), &origin(), true).unwrap();
        let expected = Utc.with_ymd_and_hms(2014, 7, 1, 12, 0, 0).unwrap();
        assert_eq!(msgs[0].timestamp, expected);
    }

    #[test]
    fn lenient_mode_counts_and_skips_bad_lines() {
        let input = [
            valid_line("m1"),
            "{not json".to_string(),
            valid_line("m2").replace("34.05", "134.05"),
            valid_line("m3").replace("-118.24", "-318.0"),
            valid_line("m4").replace("\"timestamp\":\"2014-07-01T12:00:00Z\"", "\"timestamp\":\"2014-07-01 12:00\""),
            valid_line("m5").replace(",\"text\":\"hello world\"", ""),
            valid_line("m6"),
        ]
        .join("\n");
        let (msgs, stats) = read_messages(Cursor::new(input), &origin(), false).unwrap();
        assert_eq!(msgs.len(), 2);
        assert_eq!(stats.total_lines, 7);
        assert_eq!(stats.accepted, 2);
        assert_eq!(stats.rejected, 5);
        assert_eq!(stats.duplicates, 0);
        assert_eq!(
            stats.accepted + stats.rejected + stats.duplicates,
            stats.total_lines
        );
    }

    #[test]
    fn strict_mode_reports_line_numbers() {
        let input = format!("{}\n{}\n{{bad", valid_line("m1"), valid_line("m2"));
        let err = read_messages(Cursor::new(input), &origin(), true).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn timestamp_without_offset_is_rejected() {
        let line = valid_line("m1").replace("12:00:00Z", "12:00:00");
        let (_, stats) = read_messages(Cursor::new(line), &origin(), false).unwrap();
        assert_eq!(stats.rejected, 1);
    }

    #[test]
    fn duplicate_ids_keep_first_occurrence_in_both_modes() {
        for strict in [false, true] {
            let first = valid_line("m1");
            let dup = valid_line("m1").replace("hello world", "second copy");
            let input = format!("{first}\n{dup}");
            let (msgs, stats) = read_messages(Cursor::new(input), &origin(), strict).unwrap();
            assert_eq!(msgs.len(), 1);
            assert_eq!(msgs[0].text, "hello world");
            assert_eq!(stats.duplicates, 1);
            assert_eq!(stats.accepted, 1);
        }
    }

    #[test]
    fn write_then_read_round_trips() {
        let input = format!(
            "{}\n{}",
            valid_line("m1").replace("hello world", "tabs\\tand \\\"quotes\\\" and ünïcode"),
            valid_line("m2").replace("34.05", "34.123456789")
        );
        let (msgs, _) = read_messages(Cursor::new(&input), &origin(), true).unwrap();
        let mut buf = Vec::new();
        write_messages(&mut buf, &msgs).unwrap();
        let (round, stats) = read_messages(Cursor::new(buf), &origin(), true).unwrap();
        assert_eq!(stats.accepted, 2);
        assert_eq!(round, msgs);
    }

    fn tract_doc() -> String {
        serde_json::json!({
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "properties": {
                        "tract_id": "T001",
                        "median_age": 35.5,
                        "hispanic_pop": 1200,
                        "non_hispanic_pop": 2400,
                        "pct_employed": 61.0,
                        "pct_bachelors": 30.5
                    },
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [[[0.0,0.0],[1.0,0.0],[1.0,1.0],[0.0,1.0],[0.0,0.0]]]
                    }
                },
                {
                    "type": "Feature",
                    "properties": { "tract_id": "T002", "median_age": null },
                    "geometry": {
                        "type": "MultiPolygon",
                        "coordinates": [
                            [[[2.0,0.0],[3.0,0.0],[3.0,1.0],[2.0,1.0]]],
                            [[[4.0,0.0],[5.0,0.0],[5.0,1.0],[4.0,1.0],[4.0,0.0]]]
                        ]
                    }
                }
            ]
        })
        .to_string()
    }

    #[test]
    fn tract_parsing_reads_geometry_and_nullable_demographics() {
        let set = parse_tracts(&tract_doc(), Path::new("tracts.json")).unwrap();
        assert_eq!(set.tracts.len(), 2);
        assert!(set.warnings.is_empty());
        let t1 = &set.tracts[0];
        assert_eq!(t1.tract_id, "T001");
        assert_eq!(t1.demographics.median_age, Some(35.5));
        assert_eq!(t1.demographics.hispanic_pop, Some(1200.0));
        let t2 = &set.tracts[1];
        assert_eq!(t2.demographics.median_age, None);
        assert_eq!(t2.demographics.pct_employed, None);
        assert_eq!(t2.geometry.polygons.len(), 2);
        // The first multipolygon part arrived unclosed and was auto-closed.
        let ring = &t2.geometry.polygons[0].rings[0];
        assert_eq!(ring.0.first(), ring.0.last());
        assert!(t2.geometry.contains(LatLon::new(0.5, 2.5)));
        assert!(t2.geometry.contains(LatLon::new(0.5, 4.5)));
    }

    #[test]
    fn non_polygonal_features_are_skipped_with_warnings() {
        let doc = serde_json::json!({
            "type": "FeatureCollection",
            "features": [
                {
                    "type": "Feature",
                    "properties": { "tract_id": "P1" },
                    "geometry": { "type": "Point", "coordinates": [1.0, 2.0] }
                },
                {
                    "type": "Feature",
                    "properties": { "tract_id": "P2" },
                    "geometry": null
                },
                {
                    "type": "Feature",
                    "properties": { "tract_id": "P3" },
                    "geometry": {
                        "type": "Polygon",
                        "coordinates": [[[0.0,0.0],[1.0,1.0]]]
                    }
                }
            ]
        })
        .to_string();
        let set = parse_tracts(&doc, Path::new("tracts.json")).unwrap();
        assert!(set.tracts.is_empty());
        assert_eq!(set.warnings.len(), 3);
    }

    #[test]
    fn duplicate_tract_ids_and_bad_demographics_are_fatal() {
        let dup = tract_doc().replace("T002", "T001");
        match parse_tracts(&dup, Path::new("tracts.json")) {
            Err(Error::DuplicateTract { tract_id }) => assert_eq!(tract_id, "T001"),
            other => panic!("expected duplicate error, got {other:?}"),
        }

        let bad_pct = tract_doc().replace("61.0", "161.0");
        assert!(parse_tracts(&bad_pct, Path::new("tracts.json")).is_err());
    }

    #[test]
    fn geometry_round_trips_through_feature_collection() {
        let set = parse_tracts(&tract_doc(), Path::new("tracts.json")).unwrap();
        let out =
            tracts_to_feature_collection(&set.tracts, |_| Vec::new()).to_string();
        let round = parse_tracts(&out, Path::new("round.json")).unwrap();
        assert_eq!(round.tracts, set.tracts);
    }

    #[test]
    fn bundled_sentiment_lexicon_parses_and_has_expected_entries() {
        let lex = SentimentLexicon::bundled();
        assert_eq!(lex.term_strengths.get("love"), Some(&3));
        assert_eq!(lex.term_strengths.get("hate"), Some(&-4));
        assert_eq!(lex.boosters.get("very"), Some(&1));
        assert!(lex.negators.contains("not"));
        assert_eq!(lex.emoticons.get(":)"), Some(&2));
        assert_eq!(lex.idioms.get("over the moon"), Some(&4));
        for v in lex.term_strengths.values().chain(lex.emoticons.values()) {
            assert!((-5..=5).contains(v) && *v != 0);
        }
    }

    #[test]
    fn sentiment_lexicon_rejects_out_of_range_and_overlap() {
        let text = "[terms]\ngreat\t6\n";
        let err = parse_sentiment_lexicon(text, Path::new("lex")).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }

        let overlap = "[terms]\nxo\t2\n[emoticons]\nxo\t2\n";
        assert!(parse_sentiment_lexicon(overlap, Path::new("lex")).is_err());

        let zero = "[terms]\nmeh\t0\n";
        assert!(parse_sentiment_lexicon(zero, Path::new("lex")).is_err());
    }

    #[test]
    fn bundled_vad_lexicon_parses_with_values_in_range() {
        let lex = VadLexicon::bundled();
        let happy = lex.entries.get("happy").unwrap();
        assert_eq!(happy.valence, 8.21);
        assert_eq!(happy.arousal, 6.49);
        assert_eq!(happy.dominance, 7.21);
        for vad in lex.entries.values() {
            for v in [vad.valence, vad.arousal, vad.dominance] {
                assert!((1.0..=9.0).contains(&v));
            }
        }
    }

    #[test]
    fn vad_lexicon_rejects_out_of_range_values() {
        let text = "calm\t9.5\t2.0\t5.0\n";
        assert!(parse_vad_lexicon(text, Path::new("vad")).is_err());
        let short = "calm\t5.0\t2.0\n";
        assert!(parse_vad_lexicon(short, Path::new("vad")).is_err());
    }

    #[test]
    fn stopwords_load_lowercased() {
        let words = bundled_stopwords();
        assert!(words.contains("the"));
        assert!(words.contains("i'm"));
        assert!(!words.contains(""));
    }
}
