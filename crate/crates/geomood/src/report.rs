//! Tract-level aggregation and reporting.
//!
//! Scored messages roll up into per-tract aggregates; tracts roll up into
//! three nested cohorts (all tracts, tracts with check-ins, tracts at or
//! above a check-in threshold); cohorts roll up into the summary table,
//! correlation matrices, term-frequency lists, and a map overlay.

use crate::checkin::CheckinCounts;
use crate::error::Error;
use crate::ingest::{tracts_to_feature_collection, Demographics, Tract};
use crate::mobility::TractMobility;
use crate::sentiment::{SentimentScore, VadScore};
use crate::stats::{pearson, CorrelationResult};
use crate::Result;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

/// A message after scoring, ready for aggregation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredMessage {
    pub message_id: String,
    pub user_id: String,
    pub sentiment: SentimentScore,
    pub vad: Option<VadScore>,
    pub is_checkin: bool,
}

/// Aggregation switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AggregateOptions {
    /// Check-in announcements are auto-generated, so by default they do not
    /// contribute to a tract's emotion means (they still count as messages
    /// and check-ins).
    pub include_checkins_in_emotion: bool,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        AggregateOptions {
            include_checkins_in_emotion: false,
        }
    }
}

/// Everything known about one tract after analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct TractAggregate {
    pub tract_id: String,
    pub n_messages: u64,
    pub n_users: u64,
    pub n_checkins: u64,
    pub mean_positive: Option<f64>,
    pub mean_negative: Option<f64>,
    pub mean_valence: Option<f64>,
    pub mean_arousal: Option<f64>,
    pub mean_dominance: Option<f64>,
    pub mean_radius_m: Option<f64>,
    pub demographics: Demographics,
}

/// Rolls scored messages up into per-tract aggregates.
///
/// `assignments` maps message id → tract id (unlocalized messages are
/// simply absent). Tracts appear in id order; only tracts with at least one
/// message appear. Emotion means skip messages excluded by `options`, and
/// V/A/D means additionally skip messages the affect lexicon never matched.
pub fn aggregate_tracts(
    scored: &[ScoredMessage],
    assignments: &BTreeMap<String, String>,
    checkin_counts: &CheckinCounts,
    tract_mobility: &[TractMobility],
    demographics: &BTreeMap<String, Demographics>,
    options: AggregateOptions,
) -> Vec<TractAggregate> {
    #[derive(Default)]
    struct Acc {
        n_messages: u64,
        users: BTreeSet<String>,
        p_sum: f64,
        n_sum: f64,
        emotion_n: u64,
        v_sum: f64,
        a_sum: f64,
        d_sum: f64,
        vad_n: u64,
    }
    let mut by_tract: BTreeMap<&str, Acc> = BTreeMap::new();
    for msg in scored {
        let Some(tract_id) = assignments.get(&msg.message_id) else {
            continue;
        };
        let acc = by_tract.entry(tract_id.as_str()).or_default();
        acc.n_messages += 1;
        acc.users.insert(msg.user_id.clone());
        if msg.is_checkin && !options.include_checkins_in_emotion {
            continue;
        }
        acc.p_sum += msg.sentiment.positive as f64;
        acc.n_sum += msg.sentiment.negative as f64;
        acc.emotion_n += 1;
        if let Some(vad) = &msg.vad {
            acc.v_sum += vad.valence;
            acc.a_sum += vad.arousal;
            acc.d_sum += vad.dominance;
            acc.vad_n += 1;
        }
    }
    let mobility_by_tract: BTreeMap<&str, &TractMobility> = tract_mobility
        .iter()
        .map(|m| (m.tract_id.as_str(), m))
        .collect();
    by_tract
        .into_iter()
        .map(|(tract_id, acc)| {
            let emotion = |sum: f64| (acc.emotion_n > 0).then(|| sum / acc.emotion_n as f64);
            let vad = |sum: f64| (acc.vad_n > 0).then(|| sum / acc.vad_n as f64);
            TractAggregate {
                tract_id: tract_id.to_string(),
                n_messages: acc.n_messages,
                n_users: acc.users.len() as u64,
                n_checkins: checkin_counts.per_tract.get(tract_id).copied().unwrap_or(0),
                mean_positive: emotion(acc.p_sum),
                mean_negative: emotion(acc.n_sum),
                mean_valence: vad(acc.v_sum),
                mean_arousal: vad(acc.a_sum),
                mean_dominance: vad(acc.d_sum),
                mean_radius_m: mobility_by_tract.get(tract_id).map(|m| m.mean_radius_m),
                demographics: demographics.get(tract_id).copied().unwrap_or_default(),
            }
        })
        .collect()
}

/// A named set of tracts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cohort {
    pub name: String,
    pub members: BTreeSet<String>,
}

/// The three nested cohorts compared throughout the reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cohorts {
    pub all: Cohort,
    pub with_checkins: Cohort,
    pub above_threshold: Cohort,
    pub threshold: u64,
}

impl Cohorts {
    pub fn rows(&self) -> [&Cohort; 3] {
        [&self.all, &self.with_checkins, &self.above_threshold]
    }

    /// Finds a cohort by its CLI name: `all`, `with-checkins`, `above-threshold`.
    pub fn by_key(&self, key: &str) -> Result<&Cohort> {
        match key {
            "all" => Ok(&self.all),
            "with-checkins" => Ok(&self.with_checkins),
            "above-threshold" => Ok(&self.above_threshold),
            other => Err(Error::UnknownName {
                kind: "cohort",
                name: other.to_string(),
                expected: "all, with-checkins, above-threshold".into(),
            }),
        }
    }
}

/// Splits tracts into the three cohorts. `threshold` must be at least 1;
/// membership in the third cohort means `n_checkins >= threshold`.
pub fn build_cohorts(aggregates: &[TractAggregate], threshold: u64) -> Result<Cohorts> {
    if threshold == 0 {
        return Err(Error::Config {
            reason: "check-in threshold must be at least 1".into(),
        });
    }
    let member = |pred: &dyn Fn(&TractAggregate) -> bool| -> BTreeSet<String> {
        aggregates
            .iter()
            .filter(|t| pred(t))
            .map(|t| t.tract_id.clone())
            .collect()
    };
    Ok(Cohorts {
        all: Cohort {
            name: "All Tracts".into(),
            members: member(&|_| true),
        },
        with_checkins: Cohort {
            name: "Tracts with Check-ins".into(),
            members: member(&|t| t.n_checkins >= 1),
        },
        above_threshold: Cohort {
            name: format!("Tracts with >={threshold} Check-ins"),
            members: member(&|t| t.n_checkins >= threshold),
        },
        threshold,
    })
}

/// Names of per-tract metrics usable in tests, correlations, and overlays.
pub const METRIC_NAMES: [&str; 14] = [
    "mean_V",
    "mean_A",
    "mean_D",
    "mean_P",
    "mean_N",
    "r_g",
    "n_messages",
    "n_users",
    "n_checkins",
    "median_age",
    "hispanic_pop",
    "non_hispanic_pop",
    "pct_employed",
    "pct_bachelors",
];

/// Reads one metric off an aggregate; `None` means missing for that tract.
pub fn metric_value(aggregate: &TractAggregate, name: &str) -> Result<Option<f64>> {
    let v = match name {
        "mean_V" => aggregate.mean_valence,
        "mean_A" => aggregate.mean_arousal,
        "mean_D" => aggregate.mean_dominance,
        "mean_P" => aggregate.mean_positive,
        "mean_N" => aggregate.mean_negative,
        "r_g" => aggregate.mean_radius_m,
        "n_messages" => Some(aggregate.n_messages as f64),
        "n_users" => Some(aggregate.n_users as f64),
        "n_checkins" => Some(aggregate.n_checkins as f64),
        "median_age" => aggregate.demographics.median_age,
        "hispanic_pop" => aggregate.demographics.hispanic_pop,
        "non_hispanic_pop" => aggregate.demographics.non_hispanic_pop,
        "pct_employed" => aggregate.demographics.pct_employed,
        "pct_bachelors" => aggregate.demographics.pct_bachelors,
        other => {
            return Err(Error::UnknownName {
                kind: "metric",
                name: other.to_string(),
                expected: METRIC_NAMES.join(", "),
            })
        }
    };
    Ok(v)
}

/// The values of `metric` over a cohort's members, skipping missing ones.
pub fn cohort_metric_values(
    aggregates: &[TractAggregate],
    cohort: &Cohort,
    metric: &str,
) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for agg in aggregates {
        if cohort.members.contains(&agg.tract_id) {
            if let Some(v) = metric_value(agg, metric)? {
                values.push(v);
            }
        }
    }
    Ok(values)
}

/// Message-level values of an emotion metric pooled across every message
/// localized to a cohort's member tracts.
///
/// Unlike [`cohort_metric_values`], which gives one value per tract (the
/// distribution of tract means), this flattens all member messages into one
/// sample, so heavily posted tracts weigh more. Supports the five emotion
/// metrics only; check-in announcements and (for affect metrics) unmatched
/// messages are skipped under the same rules as [`aggregate_tracts`] with
/// default options.
pub fn pooled_emotion_values(
    scored: &[ScoredMessage],
    assignments: &BTreeMap<String, String>,
    cohort: &Cohort,
    metric: &str,
) -> Result<Vec<f64>> {
    let value = |s: &ScoredMessage| -> Result<Option<f64>> {
        let v = match metric {
            "mean_P" => Some(f64::from(s.sentiment.positive)),
            "mean_N" => Some(f64::from(s.sentiment.negative)),
            "mean_V" => s.vad.as_ref().map(|v| v.valence),
            "mean_A" => s.vad.as_ref().map(|v| v.arousal),
            "mean_D" => s.vad.as_ref().map(|v| v.dominance),
            _ => {
                return Err(Error::UnknownName {
                    kind: "pooled metric",
                    name: metric.to_string(),
                    expected: "mean_V, mean_A, mean_D, mean_P, mean_N".into(),
                })
            }
        };
        Ok(v)
    };
    let mut values = Vec::new();
    for s in scored {
        if s.is_checkin {
            continue;
        }
        let in_cohort = assignments
            .get(&s.message_id)
            .is_some_and(|tract_id| cohort.members.contains(tract_id));
        if in_cohort {
            if let Some(v) = value(s)? {
                values.push(v);
            }
        }
    }
    Ok(values)
}

/// One row of the cohort summary: means over member tracts, skipping
/// tracts where a value is missing.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub cohort: String,
    pub n_tracts: u64,
    pub mean_valence: Option<f64>,
    pub mean_arousal: Option<f64>,
    pub mean_dominance: Option<f64>,
    pub mean_positive: Option<f64>,
    pub mean_negative: Option<f64>,
    pub mean_radius_m: Option<f64>,
    pub median_age: Option<f64>,
    pub hispanic_pop: Option<f64>,
    pub non_hispanic_pop: Option<f64>,
    pub pct_employed: Option<f64>,
    pub pct_bachelors: Option<f64>,
}

/// The three-cohort summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

/// Builds the summary over the three cohorts.
pub fn summarize(aggregates: &[TractAggregate], cohorts: &Cohorts) -> Summary {
    let rows = cohorts
        .rows()
        .into_iter()
        .map(|cohort| {
            let members: Vec<&TractAggregate> = aggregates
                .iter()
                .filter(|a| cohort.members.contains(&a.tract_id))
                .collect();
            let m = |f: &dyn Fn(&TractAggregate) -> Option<f64>| {
                mean_of(members.iter().map(|a| f(a)))
            };
            SummaryRow {
                cohort: cohort.name.clone(),
                n_tracts: members.len() as u64,
                mean_valence: m(&|a| a.mean_valence),
                mean_arousal: m(&|a| a.mean_arousal),
                mean_dominance: m(&|a| a.mean_dominance),
                mean_positive: m(&|a| a.mean_positive),
                mean_negative: m(&|a| a.mean_negative),
                mean_radius_m: m(&|a| a.mean_radius_m),
                median_age: m(&|a| a.demographics.median_age),
                hispanic_pop: m(&|a| a.demographics.hispanic_pop),
                non_hispanic_pop: m(&|a| a.demographics.non_hispanic_pop),
                pct_employed: m(&|a| a.demographics.pct_employed),
                pct_bachelors: m(&|a| a.demographics.pct_bachelors),
            }
        })
        .collect();
    Summary { rows }
}

fn cell(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => "-".to_string(),
    }
}

/// Renders the summary as CSV: an emotion block, a mobility block, and a
/// demographics block, separated by blank lines.
pub fn summary_csv(summary: &Summary) -> String {
    let mut out = String::new();
    out.push_str("Tracts,#Tracts,Valence,Arousal,Dominance,Positive,Negative\n");
    for r in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.cohort,
            r.n_tracts,
            cell(r.mean_valence, 3),
            cell(r.mean_arousal, 3),
            cell(r.mean_dominance, 3),
            cell(r.mean_positive, 3),
            cell(r.mean_negative, 3),
        );
    }
    out.push('\n');
    out.push_str("Tracts,#Tracts,R_g\n");
    for r in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.cohort,
            r.n_tracts,
            cell(r.mean_radius_m, 1)
        );
    }
    out.push('\n');
    out.push_str(
        "Tracts,#Tracts,Median Age,Hispanic Pop,Non-Hispanic Pop,Pct Employed,Pct Bachelors\n",
    );
    for r in &summary.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.cohort,
            r.n_tracts,
            cell(r.median_age, 1),
            cell(r.hispanic_pop, 1),
            cell(r.non_hispanic_pop, 1),
            cell(r.pct_employed, 1),
            cell(r.pct_bachelors, 1),
        );
    }
    out
}

/// Word frequencies over the messages assigned to one tract.
///
/// Terms are lowercased word surfaces (hashtags contribute their word
/// part); URLs, mentions, emoticons, punctuation, and stopwords are
/// excluded. Sorted by count descending, then term ascending. Errors when
/// the tract has no messages.
pub fn term_frequencies(
    texts_by_message: &[(String, String)],
    assignments: &BTreeMap<String, String>,
    tract_id: &str,
    stopwords: &HashSet<String>,
) -> Result<Vec<(String, u64)>> {
    use crate::sentiment::{tokenize, TokenKind};
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut saw_message = false;
    for (message_id, text) in texts_by_message {
        if assignments.get(message_id).map(String::as_str) != Some(tract_id) {
            continue;
        }
        saw_message = true;
        for token in tokenize(text) {
            let term = match token.kind {
                TokenKind::Word => token.surface.to_lowercase(),
                TokenKind::HashtagWord => {
                    token.surface.chars().skip(1).collect::<String>().to_lowercase()
                }
                _ => continue,
            };
            if term.is_empty() || stopwords.contains(&term) {
                continue;
            }
            *counts.entry(term).or_insert(0) += 1;
        }
    }
    if !saw_message {
        return Err(Error::UnknownTract {
            tract_id: tract_id.to_string(),
        });
    }
    let mut out: Vec<(String, u64)> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// A symmetric matrix of pairwise correlations over tract metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub fields: Vec<String>,
    /// `cells[i][j]` is the correlation of field i with field j over the
    /// tracts where both are present; `None` when undefined (a constant
    /// field or fewer than three complete pairs).
    pub cells: Vec<Vec<Option<CorrelationResult>>>,
}

impl CorrelationMatrix {
    /// CSV rendering: header row of field names, `r` to four decimals,
    /// undefined cells as `-`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "field,{}", self.fields.join(","));
        for (i, field) in self.fields.iter().enumerate() {
            let row: Vec<String> = self.cells[i]
                .iter()
                .map(|c| match c {
                    Some(c) => format!("{:.4}", c.r),
                    None => "-".to_string(),
                })
                .collect();
            let _ = writeln!(out, "{field},{}", row.join(","));
        }
        out
    }
}

/// Pairwise-complete correlations between the named metrics.
///
/// Tracts missing either value drop out of that pair only. Needs at least
/// three tracts overall; unknown field names are errors.
pub fn correlation_matrix(
    aggregates: &[TractAggregate],
    fields: &[String],
) -> Result<CorrelationMatrix> {
    if fields.is_empty() {
        return Err(Error::Config {
            reason: "no fields requested for correlation".into(),
        });
    }
    if aggregates.len() < 3 {
        return Err(Error::InsufficientData {
            what: "tracts for correlation".into(),
            needed: 3,
            got: aggregates.len(),
        });
    }
    // Resolve every field once; unknown names fail fast.
    let columns: Vec<Vec<Option<f64>>> = fields
        .iter()
        .map(|f| {
            aggregates
                .iter()
                .map(|a| metric_value(a, f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cells = vec![vec![None; fields.len()]; fields.len()];
    for i in 0..fields.len() {
        for j in i..fields.len() {
            let pairs: Vec<(f64, f64)> = columns[i]
                .iter()
                .zip(&columns[j])
                .filter_map(|(a, b)| a.zip(*b))
                .collect();
            let cell = match pearson(&pairs) {
                Ok(r) => Some(r),
                Err(Error::ConstantInput { .. }) | Err(Error::InsufficientData { .. }) => None,
                Err(e) => return Err(e),
            };
            cells[i][j] = cell;
            cells[j][i] = cell;
        }
    }
    Ok(CorrelationMatrix {
        fields: fields.to_vec(),
        cells,
    })
}

/// Map overlay: every tract as a feature carrying `tract_id` and the chosen
/// metric (JSON `null` where missing or the tract had no messages).
pub fn metric_overlay_geojson(
    tracts: &[Tract],
    aggregates: &[TractAggregate],
    metric: &str,
) -> Result<String> {
    // Validate the metric name once up front.
    if !METRIC_NAMES.contains(&metric) {
        return Err(Error::UnknownName {
            kind: "metric",
            name: metric.to_string(),
            expected: METRIC_NAMES.join(", "),
        });
    }
    let by_id: BTreeMap<&str, &TractAggregate> = aggregates
        .iter()
        .map(|a| (a.tract_id.as_str(), a))
        .collect();
    let collection = tracts_to_feature_collection(tracts, |tract| {
        let value = by_id
            .get(tract.tract_id.as_str())
            .and_then(|a| metric_value(a, metric).expect("metric name validated"));
        vec![(
            metric.to_string(),
            value.map(serde_json::Value::from).unwrap_or(serde_json::Value::Null),
        )]
    });
    Ok(collection.to_string())
}
