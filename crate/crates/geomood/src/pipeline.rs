//! End-to-end batch pipeline with a reproducible run manifest.
//!
//! [`run_pipeline`] chains ingest → localize → check-in parse → score →
//! mobility → aggregate → summary in memory, writes one interchange file
//! per stage into the output directory, and records a manifest with input
//! digests, the full configuration, per-stage counts, and output digests.
//! Per-message and per-user work fans out over a fixed-size worker pool;
//! every merge is order-preserving, so outputs are byte-identical for any
//! worker count and any number of reruns. Wall-clock timings live under a
//! single manifest key so tooling can strip them before comparing runs.

use crate::checkin::{count_checkins_per_tract, parse_checkin, CheckIn};
use crate::error::Error;
use crate::geo::SpatialIndex;
use crate::ingest::{
    load_messages, load_tracts, sentiment_lexicon_from, stopwords_from, vad_lexicon_from,
    Demographics, IngestStats, BUNDLED_SENTIMENT_SOURCE, BUNDLED_STOPWORDS_SOURCE,
    BUNDLED_VAD_SOURCE,
};
use crate::mobility::{tract_mobility, user_mobility, PointScope, TractMobility, UserMobility};
use crate::report::{
    aggregate_tracts, build_cohorts, summarize, summary_csv, AggregateOptions, Cohorts,
    ScoredMessage, TractAggregate,
};
use crate::sentiment::{score_sentistrength, score_vad, tokenize};
use crate::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Complete, validated configuration for one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// JSONL message corpus.
    pub messages: PathBuf,
    /// GeoJSON tract boundaries with demographic properties.
    pub tracts: PathBuf,
    /// Sentiment lexicon override; bundled lexicon when absent.
    pub sentiment_lexicon: Option<PathBuf>,
    /// Affect-norm lexicon override; bundled lexicon when absent.
    pub vad_lexicon: Option<PathBuf>,
    /// Stopword list override; bundled list when absent.
    pub stopwords: Option<PathBuf>,
    /// Directory for all outputs (created if missing).
    pub out_dir: PathBuf,
    /// Minimum check-ins for the top cohort (inclusive).
    pub cohort_threshold: u64,
    /// Let check-in announcements contribute to tract emotion means.
    pub include_checkins_in_emotion: bool,
    /// Compute user mobility from check-in points only.
    pub rg_checkins_only: bool,
    /// Abort on the first malformed corpus line instead of skipping it.
    pub strict_ingest: bool,
    /// Worker threads for per-message and per-user stages.
    pub workers: usize,
}

impl PipelineConfig {
    /// A config with default knobs for the given required paths.
    pub fn new(
        messages: impl Into<PathBuf>,
        tracts: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> PipelineConfig {
        PipelineConfig {
            messages: messages.into(),
            tracts: tracts.into(),
            sentiment_lexicon: None,
            vad_lexicon: None,
            stopwords: None,
            out_dir: out_dir.into(),
            cohort_threshold: 3,
            include_checkins_in_emotion: false,
            rg_checkins_only: false,
            strict_ingest: false,
            workers: 1,
        }
    }

    /// Checks paths and knobs before any work starts.
    pub fn validate(&self) -> Result<()> {
        for (what, path) in [("messages", &self.messages), ("tracts", &self.tracts)] {
            if !path.is_file() {
                return Err(Error::Config {
                    reason: format!("{what} file {} does not exist", path.display()),
                });
            }
        }
        for path in [&self.sentiment_lexicon, &self.vad_lexicon, &self.stopwords]
            .into_iter()
            .flatten()
        {
            if !path.is_file() {
                return Err(Error::Config {
                    reason: format!("lexicon file {} does not exist", path.display()),
                });
            }
        }
        if self.cohort_threshold == 0 {
            return Err(Error::Config {
                reason: "cohort threshold must be at least 1".into(),
            });
        }
        if self.workers == 0 {
            return Err(Error::Config {
                reason: "worker count must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Partial configuration as read from a TOML file; every field optional so
/// files and command-line flags can layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub messages: Option<PathBuf>,
    pub tracts: Option<PathBuf>,
    pub sentiment_lexicon: Option<PathBuf>,
    pub vad_lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub cohort_threshold: Option<u64>,
    pub include_checkins_in_emotion: Option<bool>,
    pub rg_checkins_only: Option<bool>,
    pub strict_ingest: Option<bool>,
    pub workers: Option<usize>,
}

impl ConfigOverlay {
    /// Parses a TOML config file.
    pub fn from_toml_file(path: &Path) -> Result<ConfigOverlay> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config {
            reason: format!("{}: {e}", path.display()),
        })
    }

    /// Lays `other` over `self`: fields set in `other` win.
    pub fn merged_with(mut self, other: ConfigOverlay) -> ConfigOverlay {
        macro_rules! take {
            ($field:ident) => {
                if other.$field.is_some() {
                    self.$field = other.$field;
                }
            };
        }
        take!(messages);
        take!(tracts);
        take!(sentiment_lexicon);
        take!(vad_lexicon);
        take!(stopwords);
        take!(out_dir);
        take!(cohort_threshold);
        take!(include_checkins_in_emotion);
        take!(rg_checkins_only);
        take!(strict_ingest);
        take!(workers);
        self
    }

    /// Finalizes into a full config; the three required paths must be set.
    pub fn into_config(self) -> Result<PipelineConfig> {
        let require = |name: &str, v: Option<PathBuf>| {
            v.ok_or_else(|| Error::Config {
                reason: format!("missing required setting {name:?} (set it in the config file or pass the flag)"),
            })
        };
        let mut config = PipelineConfig::new(
            require("messages", self.messages)?,
            require("tracts", self.tracts)?,
            require("out_dir", self.out_dir)?,
        );
        config.sentiment_lexicon = self.sentiment_lexicon;
        config.vad_lexicon = self.vad_lexicon;
        config.stopwords = self.stopwords;
        if let Some(v) = self.cohort_threshold {
            config.cohort_threshold = v;
        }
        if let Some(v) = self.include_checkins_in_emotion {
            config.include_checkins_in_emotion = v;
        }
        if let Some(v) = self.rg_checkins_only {
            config.rg_checkins_only = v;
        }
        if let Some(v) = self.strict_ingest {
            config.strict_ingest = v;
        }
        if let Some(v) = self.workers {
            config.workers = v;
        }
        Ok(config)
    }
}

/// One hashed input in the manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub source: String,
    pub sha256: String,
}

/// Localization stage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizeCounts {
    pub localized: u64,
    pub unlocalized: u64,
}

/// Check-in stage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckinStageCounts {
    pub found: u64,
    pub localized: u64,
    pub unlocalized: u64,
}

/// Scoring stage counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreCounts {
    pub scored: u64,
    pub vad_covered: u64,
    /// Fraction of scored messages with at least one affect-lexicon term.
    pub coverage: f64,
}

/// Mobility stage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MobilityCounts {
    pub users: u64,
    pub tracts: u64,
}

/// Aggregation stage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateCounts {
    pub tracts: u64,
    pub cohort_all: u64,
    pub cohort_with_checkins: u64,
    pub cohort_above_threshold: u64,
}

/// Per-stage counts; a stage that never ran stays `None` in a partial
/// manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageCounts {
    pub ingest: Option<IngestStats>,
    pub localize: Option<LocalizeCounts>,
    pub checkins: Option<CheckinStageCounts>,
    pub score: Option<ScoreCounts>,
    pub mobility: Option<MobilityCounts>,
    pub aggregate: Option<AggregateCounts>,
}

/// The run record written next to the outputs as `manifest.json`.
///
/// Everything except `timings_ms` is a pure function of the inputs and the
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub config: PipelineConfig,
    pub inputs: BTreeMap<String, InputDigest>,
    pub warnings: Vec<String>,
    pub stages: StageCounts,
    /// Output file name → sha256 of its bytes.
    pub outputs: BTreeMap<String, String>,
    pub error: Option<String>,
    /// Wall-clock per stage; the only run-dependent section.
    pub timings_ms: BTreeMap<String, u64>,
}

/// Everything a run produced, for callers that keep going in-process.
#[derive(Debug)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub scored: Vec<ScoredMessage>,
    pub aggregates: Vec<TractAggregate>,
    pub cohorts: Cohorts,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_path(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputDigest {
        source: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

fn digest_optional(path: Option<&PathBuf>, bundled: &str) -> Result<InputDigest> {
    match path {
        Some(p) => digest_path(p),
        None => Ok(InputDigest {
            source: "<bundled>".into(),
            sha256: sha256_hex(bundled.as_bytes()),
        }),
    }
}

fn opt_num(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => "-".into(),
    }
}

fn opt_str(v: Option<&str>) -> &str {
    v.unwrap_or("-")
}

/// Runs the whole pipeline.
///
/// On success the manifest (also written to `out_dir/manifest.json`) comes
/// back with every stage populated. On a fatal stage error the partial
/// manifest is still written — with the error recorded — before the error
/// propagates.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutput> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let mut manifest = Manifest {
        config: config.clone(),
        inputs: BTreeMap::new(),
        warnings: Vec::new(),
        stages: StageCounts::default(),
        outputs: BTreeMap::new(),
        error: None,
        timings_ms: BTreeMap::new(),
    };
    let result = run_stages(config, &mut manifest);
    if let Err(e) = &result {
        manifest.error = Some(e.to_string());
    }
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::internal(format!("serializing manifest: {e}")))?
        + "\n";
    let manifest_path = config.out_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest_json).map_err(|e| Error::io(&manifest_path, e))?;
    let (scored, aggregates, cohorts) = result?;
    Ok(RunOutput {
        manifest,
        scored,
        aggregates,
        cohorts,
    })
}

type StageData = (Vec<ScoredMessage>, Vec<TractAggregate>, Cohorts);

fn run_stages(config: &PipelineConfig, manifest: &mut Manifest) -> Result<StageData> {
    let write_output = |name: &str, content: &str, manifest: &mut Manifest| -> Result<()> {
        let path = config.out_dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        manifest.outputs.insert(name.into(), sha256_hex(content.as_bytes()));
        Ok(())
    };
    let mut timed = Timings::new();

    manifest.inputs.insert("messages".into(), digest_path(&config.messages)?);
    manifest.inputs.insert("tracts".into(), digest_path(&config.tracts)?);
    manifest.inputs.insert(
        "sentiment_lexicon".into(),
        digest_optional(config.sentiment_lexicon.as_ref(), BUNDLED_SENTIMENT_SOURCE)?,
    );
    manifest.inputs.insert(
        "vad_lexicon".into(),
        digest_optional(config.vad_lexicon.as_ref(), BUNDLED_VAD_SOURCE)?,
    );
    manifest.inputs.insert(
        "stopwords".into(),
        digest_optional(config.stopwords.as_ref(), BUNDLED_STOPWORDS_SOURCE)?,
    );

    // Ingest.
    let (messages, ingest_stats) = load_messages(&config.messages, config.strict_ingest)?;
    manifest.stages.ingest = Some(ingest_stats);
    timed.lap("ingest", &mut manifest.timings_ms);
    if messages.is_empty() {
        return Err(Error::EmptyInput {
            what: format!("message corpus {}", config.messages.display()),
        });
    }

    let tract_set = load_tracts(&config.tracts)?;
    manifest.warnings.extend(tract_set.warnings.iter().cloned());
    let demographics: BTreeMap<String, Demographics> = tract_set
        .tracts
        .iter()
        .map(|t| (t.tract_id.clone(), t.demographics))
        .collect();
    let index = SpatialIndex::build(
        tract_set
            .tracts
            .into_iter()
            .map(|t| (t.tract_id, t.geometry))
            .collect(),
    )?;
    let sentiment_lexicon = sentiment_lexicon_from(config.sentiment_lexicon.as_ref())?;
    let vad_lexicon = vad_lexicon_from(config.vad_lexicon.as_ref())?;
    // Stopwords are report-time data; loading here validates the path once.
    let _stopwords = stopwords_from(config.stopwords.as_ref())?;
    timed.lap("load_reference", &mut manifest.timings_ms);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::internal(format!("building worker pool: {e}")))?;

    // Localize: per-message, order-preserving.
    let located: Vec<Option<String>> = pool.install(|| {
        messages
            .par_iter()
            .map(|m| index.locate(m.position()).map(str::to_string))
            .collect()
    });
    let assignments: BTreeMap<String, String> = messages
        .iter()
        .zip(&located)
        .filter_map(|(m, t)| t.as_ref().map(|t| (m.message_id.clone(), t.clone())))
        .collect();
    let localize_counts = LocalizeCounts {
        localized: assignments.len() as u64,
        unlocalized: messages.len() as u64 - assignments.len() as u64,
    };
    manifest.stages.localize = Some(localize_counts);
    let mut tsv = String::from("message_id\ttract_id\n");
    for (m, t) in messages.iter().zip(&located) {
        let _ = writeln!(tsv, "{}\t{}", m.message_id, opt_str(t.as_deref()));
    }
    write_output("localized.tsv", &tsv, manifest)?;
    timed.lap("localize", &mut manifest.timings_ms);

    // Check-in detection: per-message, order-preserving.
    let parsed: Vec<Option<CheckIn>> = pool.install(|| {
        messages
            .par_iter()
            .map(|m| parse_checkin(&m.text).map(|f| f.with_message_id(&m.message_id)))
            .collect()
    });
    let checkins: Vec<CheckIn> = parsed.into_iter().flatten().collect();
    let checkin_ids: HashSet<String> =
        checkins.iter().map(|c| c.message_id.clone()).collect();
    let checkin_counts = count_checkins_per_tract(&checkins, &assignments);
    manifest.stages.checkins = Some(CheckinStageCounts {
        found: checkins.len() as u64,
        localized: checkins.len() as u64 - checkin_counts.unlocalized,
        unlocalized: checkin_counts.unlocalized,
    });
    let mut tsv = String::from("message_id\tvenue_name\tvenue_handle\tcity\tregion\ttract_id\n");
    for c in &checkins {
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}",
            c.message_id,
            c.fields.venue_name,
            opt_str(c.fields.venue_handle.as_deref()),
            opt_str(c.fields.city.as_deref()),
            opt_str(c.fields.region.as_deref()),
            opt_str(assignments.get(&c.message_id).map(String::as_str)),
        );
    }
    write_output("checkins.tsv", &tsv, manifest)?;
    timed.lap("checkins", &mut manifest.timings_ms);

    // Score: per-message, order-preserving.
    let scored: Vec<ScoredMessage> = pool.install(|| {
        messages
            .par_iter()
            .map(|m| {
                let tokens = tokenize(&m.text);
                ScoredMessage {
                    message_id: m.message_id.clone(),
                    user_id: m.user_id.clone(),
                    sentiment: score_sentistrength(&tokens, &sentiment_lexicon),
                    vad: score_vad(&tokens, &vad_lexicon),
                    is_checkin: checkin_ids.contains(&m.message_id),
                }
            })
            .collect()
    });
    let vad_covered = scored.iter().filter(|s| s.vad.is_some()).count() as u64;
    manifest.stages.score = Some(ScoreCounts {
        scored: scored.len() as u64,
        vad_covered,
        coverage: vad_covered as f64 / scored.len() as f64,
    });
    let mut tsv = String::from(
        "message_id\tpositive\tnegative\tvalence\tarousal\tdominance\tmatched_terms\n",
    );
    for s in &scored {
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.message_id,
            s.sentiment.positive,
            s.sentiment.negative,
            opt_num(s.vad.as_ref().map(|v| v.valence), 4),
            opt_num(s.vad.as_ref().map(|v| v.arousal), 4),
            opt_num(s.vad.as_ref().map(|v| v.dominance), 4),
            s.vad.as_ref().map_or(0, |v| v.matched_terms),
        );
    }
    write_output("scores.tsv", &tsv, manifest)?;
    timed.lap("score", &mut manifest.timings_ms);

    // Mobility: group sequentially (stable), compute per-user in parallel.
    let scope = if config.rg_checkins_only {
        PointScope::CheckinsOnly
    } else {
        PointScope::AllMessages
    };
    let mut points_by_user: BTreeMap<&str, Vec<crate::geo::LatLon>> = BTreeMap::new();
    for m in &messages {
        if scope == PointScope::CheckinsOnly && !checkin_ids.contains(&m.message_id) {
            continue;
        }
        points_by_user
            .entry(m.user_id.as_str())
            .or_default()
            .push(m.position());
    }
    let user_entries: Vec<(&str, Vec<crate::geo::LatLon>)> = points_by_user.into_iter().collect();
    let mobilities: Vec<UserMobility> = pool.install(|| {
        user_entries
            .par_iter()
            .map(|(user_id, points)| user_mobility(user_id, points))
            .collect::<Result<Vec<_>>>()
    })?;
    let user_mobilities: BTreeMap<String, UserMobility> = mobilities
        .into_iter()
        .map(|m| (m.user_id.clone(), m))
        .collect();
    // Distinct posters per tract, restricted to users that have mobility
    // entries (they may not, when r_g uses check-in points only).
    let mut posters: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for m in &messages {
        if let Some(tract_id) = assignments.get(&m.message_id) {
            if user_mobilities.contains_key(&m.user_id) {
                posters
                    .entry(tract_id.clone())
                    .or_default()
                    .insert(m.user_id.clone());
            }
        }
    }
    let tract_mobilities: Vec<TractMobility> = tract_mobility(&user_mobilities, &posters)?;
    manifest.stages.mobility = Some(MobilityCounts {
        users: user_mobilities.len() as u64,
        tracts: tract_mobilities.len() as u64,
    });
    let mut tsv = String::from("user_id\tn_points\tr_g_m\n");
    for m in user_mobilities.values() {
        let _ = writeln!(tsv, "{}\t{}\t{:.3}", m.user_id, m.n_points, m.radius_m);
    }
    write_output("mobility_users.tsv", &tsv, manifest)?;
    let mut tsv = String::from("tract_id\tn_users\tmean_r_g_m\n");
    for m in &tract_mobilities {
        let _ = writeln!(tsv, "{}\t{}\t{:.3}", m.tract_id, m.n_users, m.mean_radius_m);
    }
    write_output("mobility_tracts.tsv", &tsv, manifest)?;
    timed.lap("mobility", &mut manifest.timings_ms);

    // Aggregate and summarize.
    let aggregates = aggregate_tracts(
        &scored,
        &assignments,
        &checkin_counts,
        &tract_mobilities,
        &demographics,
        AggregateOptions {
            include_checkins_in_emotion: config.include_checkins_in_emotion,
        },
    );
    let cohorts = build_cohorts(&aggregates, config.cohort_threshold)?;
    manifest.stages.aggregate = Some(AggregateCounts {
        tracts: aggregates.len() as u64,
        cohort_all: cohorts.all.members.len() as u64,
        cohort_with_checkins: cohorts.with_checkins.members.len() as u64,
        cohort_above_threshold: cohorts.above_threshold.members.len() as u64,
    });
    let mut tsv = String::from(
        "tract_id\tn_messages\tn_users\tn_checkins\tmean_positive\tmean_negative\t\
         mean_valence\tmean_arousal\tmean_dominance\tmean_r_g_m\tmedian_age\t\
         hispanic_pop\tnon_hispanic_pop\tpct_employed\tpct_bachelors\n",
    );
    for a in &aggregates {
        let d = &a.demographics;
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            a.tract_id,
            a.n_messages,
            a.n_users,
            a.n_checkins,
            opt_num(a.mean_positive, 4),
            opt_num(a.mean_negative, 4),
            opt_num(a.mean_valence, 4),
            opt_num(a.mean_arousal, 4),
            opt_num(a.mean_dominance, 4),
            opt_num(a.mean_radius_m, 3),
            opt_num(d.median_age, 1),
            opt_num(d.hispanic_pop, 1),
            opt_num(d.non_hispanic_pop, 1),
            opt_num(d.pct_employed, 1),
            opt_num(d.pct_bachelors, 1),
        );
    }
    write_output("tract_aggregates.tsv", &tsv, manifest)?;
    let summary = summarize(&aggregates, &cohorts);
    write_output("summary.csv", &summary_csv(&summary), manifest)?;
    timed.lap("aggregate", &mut manifest.timings_ms);

    Ok((scored, aggregates, cohorts))
}

/// Iterates data rows of a TSV interchange file, checking the header.
fn tsv_rows(path: &Path, expected_header: &str) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == expected_header => {}
        Some((_, header)) => {
            return Err(Error::MalformedLine {
                path: path.to_path_buf(),
                line: 1,
                reason: format!("expected header {expected_header:?}, found {header:?}"),
            })
        }
        None => {
            return Err(Error::EmptyInput {
                what: format!("interchange file {}", path.display()),
            })
        }
    }
    let n_fields = expected_header.split('\t').count();
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != n_fields {
            return Err(Error::MalformedLine {
                path: path.to_path_buf(),
                line: idx as u64 + 1,
                reason: format!("expected {n_fields} fields, found {}", fields.len()),
            });
        }
        rows.push(fields);
    }
    Ok(rows)
}

fn malformed(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine {
        path: path.to_path_buf(),
        line: line as u64 + 2,
        reason: reason.into(),
    }
}

fn parse_num<T: std::str::FromStr>(
    path: &Path,
    row: usize,
    field: &str,
    value: &str,
) -> Result<T> {
    value
        .parse()
        .map_err(|_| malformed(path, row, format!("{field}: invalid number {value:?}")))
}

fn parse_opt_num(path: &Path, row: usize, field: &str, value: &str) -> Result<Option<f64>> {
    if value == "-" {
        Ok(None)
    } else {
        parse_num(path, row, field, value).map(Some)
    }
}

/// Reads a `localized.tsv` back into message → tract assignments;
/// unlocalized rows ("-") are skipped.
pub fn read_localized_tsv(path: &Path) -> Result<BTreeMap<String, String>> {
    let rows = tsv_rows(path, "message_id\ttract_id")?;
    Ok(rows
        .into_iter()
        .filter(|row| row[1] != "-")
        .map(|mut row| (std::mem::take(&mut row[0]), std::mem::take(&mut row[1])))
        .collect())
}

/// Reads the message ids recorded in a `checkins.tsv`.
pub fn read_checkin_message_ids(path: &Path) -> Result<HashSet<String>> {
    let rows = tsv_rows(
        path,
        "message_id\tvenue_name\tvenue_handle\tcity\tregion\ttract_id",
    )?;
    Ok(rows.into_iter().map(|mut row| std::mem::take(&mut row[0])).collect())
}

/// Reads a `scores.tsv` back into per-message scores.
pub fn read_scores_tsv(
    path: &Path,
) -> Result<Vec<(String, crate::sentiment::SentimentScore, Option<crate::sentiment::VadScore>)>> {
    let rows = tsv_rows(
        path,
        "message_id\tpositive\tnegative\tvalence\tarousal\tdominance\tmatched_terms",
    )?;
    let mut scores = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let sentiment = crate::sentiment::SentimentScore {
            positive: parse_num(path, i, "positive", &row[1])?,
            negative: parse_num(path, i, "negative", &row[2])?,
        };
        let vad = match parse_opt_num(path, i, "valence", &row[3])? {
            None => None,
            Some(valence) => Some(crate::sentiment::VadScore {
                valence,
                arousal: parse_opt_num(path, i, "arousal", &row[4])?
                    .ok_or_else(|| malformed(path, i, "arousal missing while valence present"))?,
                dominance: parse_opt_num(path, i, "dominance", &row[5])?
                    .ok_or_else(|| malformed(path, i, "dominance missing while valence present"))?,
                matched_terms: parse_num(path, i, "matched_terms", &row[6])?,
            }),
        };
        let mut row = row;
        scores.push((std::mem::take(&mut row[0]), sentiment, vad));
    }
    Ok(scores)
}

/// Reads a `tract_aggregates.tsv` back into [`TractAggregate`] rows.
///
/// Mean columns carry the file's rounded precision, not the full-precision
/// values of the run that wrote them.
pub fn read_aggregates_tsv(path: &Path) -> Result<Vec<TractAggregate>> {
    let rows = tsv_rows(
        path,
        "tract_id\tn_messages\tn_users\tn_checkins\tmean_positive\tmean_negative\t\
         mean_valence\tmean_arousal\tmean_dominance\tmean_r_g_m\tmedian_age\t\
         hispanic_pop\tnon_hispanic_pop\tpct_employed\tpct_bachelors",
    )?;
    let mut aggregates = Vec::with_capacity(rows.len());
    for (i, mut row) in rows.into_iter().enumerate() {
        aggregates.push(TractAggregate {
            tract_id: std::mem::take(&mut row[0]),
            n_messages: parse_num(path, i, "n_messages", &row[1])?,
            n_users: parse_num(path, i, "n_users", &row[2])?,
            n_checkins: parse_num(path, i, "n_checkins", &row[3])?,
            mean_positive: parse_opt_num(path, i, "mean_positive", &row[4])?,
            mean_negative: parse_opt_num(path, i, "mean_negative", &row[5])?,
            mean_valence: parse_opt_num(path, i, "mean_valence", &row[6])?,
            mean_arousal: parse_opt_num(path, i, "mean_arousal", &row[7])?,
            mean_dominance: parse_opt_num(path, i, "mean_dominance", &row[8])?,
            mean_radius_m: parse_opt_num(path, i, "mean_r_g_m", &row[9])?,
            demographics: Demographics {
                median_age: parse_opt_num(path, i, "median_age", &row[10])?,
                hispanic_pop: parse_opt_num(path, i, "hispanic_pop", &row[11])?,
                non_hispanic_pop: parse_opt_num(path, i, "non_hispanic_pop", &row[12])?,
                pct_employed: parse_opt_num(path, i, "pct_employed", &row[13])?,
                pct_bachelors: parse_opt_num(path, i, "pct_bachelors", &row[14])?,
            },
        });
    }
    Ok(aggregates)
}

struct Timings {
    last: Instant,
}

impl Timings {
    fn new() -> Timings {
        Timings { last: Instant::now() }
    }

    fn lap(&mut self, stage: &str, into: &mut BTreeMap<String, u64>) {
        let now = Instant::now();
        into.insert(stage.to_string(), (now - self.last).as_millis() as u64);
        self.last = now;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{synthetic_city, CityParams, GridSpec};

    fn city_config(dir: &Path) -> PipelineConfig {
        let city = synthetic_city(&CityParams {
            grid: GridSpec {
                cols: 8,
                rows: 8,
                ..GridSpec::default()
            },
            venue_tract_count: 6,
            low_tier_count: 3,
            baseline_messages_per_tract: 10,
            venue_home_messages_per_tract: 10,
            ..CityParams::default()
        })
        .unwrap();
        let fixture_dir = dir.join("fixture");
        std::fs::create_dir_all(&fixture_dir).unwrap();
        let paths = city.write_to_dir(&fixture_dir).unwrap();
        PipelineConfig::new(paths.messages, paths.tracts, dir.join("out"))
    }

    #[test]
    fn full_run_writes_all_outputs_and_a_consistent_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let config = city_config(dir.path());
        let run = run_pipeline(&config).unwrap();
        let m = &run.manifest;
        assert!(m.error.is_none());
        for name in [
            "localized.tsv",
            "checkins.tsv",
            "scores.tsv",
            "mobility_users.tsv",
            "mobility_tracts.tsv",
            "tract_aggregates.tsv",
            "summary.csv",
        ] {
            assert!(m.outputs.contains_key(name), "missing output {name}");
            assert!(config.out_dir.join(name).is_file());
        }
        assert!(config.out_dir.join("manifest.json").is_file());

        let ingest = m.stages.ingest.unwrap();
        let localize = m.stages.localize.unwrap();
        let checkins = m.stages.checkins.unwrap();
        let score = m.stages.score.unwrap();
        assert_eq!(ingest.rejected, 0);
        assert_eq!(localize.localized + localize.unlocalized, ingest.accepted);
        assert!(checkins.found <= localize.localized + localize.unlocalized);
        assert!(checkins.localized <= localize.localized);
        assert_eq!(score.scored, ingest.accepted);
        assert!(score.coverage > 0.9, "non-checkin text is lexicon-covered");
        let aggregate = m.stages.aggregate.unwrap();
        assert_eq!(aggregate.cohort_with_checkins, 6);
        assert_eq!(aggregate.cohort_above_threshold, 3);
    }

    #[test]
    fn repeat_runs_are_byte_identical_apart_from_timings() {
        let dir = tempfile::tempdir().unwrap();
        let config = city_config(dir.path());
        let first = run_pipeline(&config).unwrap();
        let mut second_config = config.clone();
        second_config.out_dir = dir.path().join("out2");
        second_config.workers = 4;
        let second = run_pipeline(&second_config).unwrap();
        assert_eq!(first.manifest.outputs, second.manifest.outputs);
        assert_eq!(first.manifest.stages, second.manifest.stages);
        for name in first.manifest.outputs.keys() {
            let a = std::fs::read(config.out_dir.join(name)).unwrap();
            let b = std::fs::read(second_config.out_dir.join(name)).unwrap();
            assert_eq!(a, b, "{name} differs across runs/worker counts");
        }
    }

    #[test]
    fn empty_corpus_fails_but_leaves_a_partial_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = city_config(dir.path());
        let empty = dir.path().join("empty.jsonl");
        std::fs::write(&empty, "").unwrap();
        config.messages = empty;
        let err = run_pipeline(&config).unwrap_err();
        assert!(matches!(err, Error::EmptyInput { .. }));
        let manifest: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(config.out_dir.join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["stages"]["ingest"]["accepted"], 0);
        assert!(manifest["error"].as_str().unwrap().contains("empty"));
        assert_eq!(manifest["stages"]["localize"], serde_json::Value::Null);
    }

    #[test]
    fn missing_input_fails_validation_before_any_work() {
        let dir = tempfile::tempdir().unwrap();
        let config = PipelineConfig::new(
            dir.path().join("nope.jsonl"),
            dir.path().join("nope.geojson"),
            dir.path().join("out"),
        );
        assert!(matches!(
            run_pipeline(&config).unwrap_err(),
            Error::Config { .. }
        ));
        assert!(!dir.path().join("out").exists(), "no output dir created");
    }

    #[test]
    fn checkins_only_scope_limits_users_and_tracts() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = city_config(dir.path());
        config.rg_checkins_only = true;
        config.out_dir = dir.path().join("out_scoped");
        let run = run_pipeline(&config).unwrap();
        let m = run.manifest.stages.mobility.unwrap();
        let checkins = run.manifest.stages.checkins.unwrap();
        assert!(m.users as u64 <= checkins.found);
        assert!(m.tracts <= run.manifest.stages.aggregate.unwrap().cohort_with_checkins);
    }

    #[test]
    fn interchange_files_read_back_consistently() {
        let dir = tempfile::tempdir().unwrap();
        let config = city_config(dir.path());
        let run = run_pipeline(&config).unwrap();

        let assignments = read_localized_tsv(&config.out_dir.join("localized.tsv")).unwrap();
        assert_eq!(
            assignments.len() as u64,
            run.manifest.stages.localize.unwrap().localized
        );

        let checkin_ids =
            read_checkin_message_ids(&config.out_dir.join("checkins.tsv")).unwrap();
        assert_eq!(
            checkin_ids.len() as u64,
            run.manifest.stages.checkins.unwrap().found
        );

        let scores = read_scores_tsv(&config.out_dir.join("scores.tsv")).unwrap();
        assert_eq!(scores.len(), run.scored.len());
        for ((id, sentiment, vad), original) in scores.iter().zip(&run.scored) {
            assert_eq!(id, &original.message_id);
            assert_eq!(sentiment, &original.sentiment);
            assert_eq!(vad.is_some(), original.vad.is_some());
            if let (Some(read), Some(orig)) = (vad, &original.vad) {
                assert!((read.valence - orig.valence).abs() < 5e-5, "rounded to 4 places");
                assert_eq!(read.matched_terms, orig.matched_terms);
            }
        }

        let aggregates =
            read_aggregates_tsv(&config.out_dir.join("tract_aggregates.tsv")).unwrap();
        assert_eq!(aggregates.len(), run.aggregates.len());
        for (read, orig) in aggregates.iter().zip(&run.aggregates) {
            assert_eq!(read.tract_id, orig.tract_id);
            assert_eq!(read.n_messages, orig.n_messages);
            assert_eq!(read.n_checkins, orig.n_checkins);
            assert_eq!(read.mean_valence.is_some(), orig.mean_valence.is_some());
        }

        let bad_header = dir.path().join("bad.tsv");
        std::fs::write(&bad_header, "wrong\theader\nrow\trow\n").unwrap();
        assert!(matches!(
            read_localized_tsv(&bad_header),
            Err(Error::MalformedLine { line: 1, .. })
        ));
        let short_row = dir.path().join("short.tsv");
        std::fs::write(&short_row, "message_id\ttract_id\nonly_one_field\n").unwrap();
        assert!(matches!(
            read_localized_tsv(&short_row),
            Err(Error::MalformedLine { line: 2, .. })
        ));
    }

    #[test]
    fn overlay_merges_file_and_flag_settings() {
        let dir = tempfile::tempdir().unwrap();
        let toml_path = dir.path().join("run.toml");
        std::fs::write(
            &toml_path,
            "messages = \"a.jsonl\"\ntracts = \"b.geojson\"\nout_dir = \"out\"\nworkers = 2\n",
        )
        .unwrap();
        let file = ConfigOverlay::from_toml_file(&toml_path).unwrap();
        let flags = ConfigOverlay {
            workers: Some(8),
            cohort_threshold: Some(5),
            ..ConfigOverlay::default()
        };
        let config = file.merged_with(flags).into_config().unwrap();
        assert_eq!(config.workers, 8, "flags beat the file");
        assert_eq!(config.cohort_threshold, 5);
        assert_eq!(config.messages, PathBuf::from("a.jsonl"));
        assert_eq!(config.cohort_threshold, 5);

        let missing = ConfigOverlay::default().into_config();
        assert!(matches!(missing, Err(Error::Config { .. })));

        let bad = std::fs::write(dir.path().join("bad.toml"), "nonsense_key = 1").unwrap();
        let _ = bad;
        assert!(ConfigOverlay::from_toml_file(&dir.path().join("bad.toml")).is_err());
    }
}
