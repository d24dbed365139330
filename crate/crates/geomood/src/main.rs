//! Command-line interface: each analysis stage as an independent
//! subcommand over TSV interchange files, plus `run` for the chained
//! in-memory pipeline and `fixtures` for synthetic test data.

use clap::{Args, Parser, Subcommand};
use geomood::checkin::parse_checkin;
use geomood::geo::{LatLon, SpatialIndex};
use geomood::ingest::{
    load_messages, load_tracts, sentiment_lexicon_from, stopwords_from, vad_lexicon_from,
    write_messages, GeoMessage,
};
use geomood::mobility::{user_mobility, UserMobility};
use geomood::pipeline::{
    read_aggregates_tsv, read_checkin_message_ids, read_localized_tsv, read_scores_tsv,
    run_pipeline, ConfigOverlay,
};
use geomood::report::{
    build_cohorts, cohort_metric_values, correlation_matrix, metric_overlay_geojson,
    pooled_emotion_values, summarize, summary_csv, term_frequencies, Cohort, ScoredMessage,
};
use geomood::sentiment::{score_sentistrength, score_vad, tokenize};
use geomood::stats::{rank_sum_test, welch_t_test, RankSumMethod, Sides};
use geomood::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "geomood",
    version,
    about = "Tract-level emotion, check-in, and mobility analytics for geo-tagged messages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a JSONL corpus and emit it normalized.
    Ingest(IngestArgs),
    /// Assign each message to the census tract containing it.
    Localize(LocalizeArgs),
    /// Detect venue check-in announcements and their fields.
    Checkins(CheckinsArgs),
    /// Score message sentiment and affect against the lexicons.
    Score(ScoreArgs),
    /// Compute per-user and per-tract radius of gyration.
    Mobility(MobilityArgs),
    /// Compare a per-tract metric between two cohorts.
    Test(TestArgs),
    /// Render tables, overlays, and term lists from a finished run.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Run the whole pipeline and write a manifest.
    Run(RunArgs),
    /// Generate synthetic datasets with known ground truth.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Args)]
struct IngestArgs {
    /// JSONL message corpus.
    #[arg(long)]
    messages: PathBuf,
    /// Fail on the first malformed line instead of skipping it.
    #[arg(long)]
    strict: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LocalizeArgs {
    #[arg(long)]
    messages: PathBuf,
    /// GeoJSON tract boundaries.
    #[arg(long)]
    tracts: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckinsArgs {
    #[arg(long)]
    messages: PathBuf,
    /// Tract boundaries; when given, check-ins gain a tract_id column
    /// instead of "-".
    #[arg(long)]
    tracts: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    messages: PathBuf,
    /// Sentiment lexicon file; bundled lexicon when omitted.
    #[arg(long)]
    sentiment_lexicon: Option<PathBuf>,
    /// Valence/arousal/dominance lexicon file; bundled when omitted.
    #[arg(long)]
    vad_lexicon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MobilityArgs {
    #[arg(long)]
    messages: PathBuf,
    /// Tract boundaries; required for the per-tract block.
    #[arg(long)]
    tracts: Option<PathBuf>,
    /// Use only check-in messages as mobility points.
    #[arg(long)]
    checkins_only: bool,
    /// Per-user TSV output; stdout when omitted.
    #[arg(long)]
    users_out: Option<PathBuf>,
    /// Per-tract TSV output; stdout when omitted.
    #[arg(long)]
    tracts_out: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    /// Output directory of a finished `run`.
    #[arg(long)]
    run_dir: PathBuf,
    /// Metric to compare (for example mean_V, mean_N, r_g).
    #[arg(long)]
    metric: String,
    /// First cohort: all, with-checkins, or above-threshold.
    #[arg(long, default_value = "with-checkins")]
    cohort_a: String,
    /// Second cohort: all, with-checkins, or above-threshold.
    #[arg(long, default_value = "all")]
    cohort_b: String,
    /// Check-in count for the above-threshold cohort.
    #[arg(long, default_value_t = 3)]
    threshold: u64,
    /// one or two sided alternative.
    #[arg(long, default_value = "two")]
    sides: String,
    /// Pool message-level values instead of comparing tract means
    /// (emotion metrics only).
    #[arg(long)]
    pooled: bool,
    /// Also run Welch's t-test alongside the rank-sum test.
    #[arg(long)]
    welch: bool,
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Cohort summary table as CSV.
    Summary(ReportSummaryArgs),
    /// Tract polygons annotated with a chosen metric, as GeoJSON.
    Geojson(ReportGeojsonArgs),
    /// Most frequent terms in one tract's messages, as TSV.
    Terms(ReportTermsArgs),
    /// Pairwise correlations between per-tract fields, as CSV.
    Correlations(ReportCorrelationsArgs),
}

#[derive(Args)]
struct ReportSummaryArgs {
    #[arg(long)]
    run_dir: PathBuf,
    #[arg(long, default_value_t = 3)]
    threshold: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportGeojsonArgs {
    #[arg(long)]
    run_dir: PathBuf,
    /// The tract boundaries the run was produced from.
    #[arg(long)]
    tracts: PathBuf,
    #[arg(long)]
    metric: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportTermsArgs {
    #[arg(long)]
    run_dir: PathBuf,
    /// The message corpus the run was produced from.
    #[arg(long)]
    messages: PathBuf,
    #[arg(long)]
    tract: String,
    /// Keep only the N most frequent terms.
    #[arg(long, default_value_t = 20)]
    top: usize,
    /// Stopword list; bundled list when omitted.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportCorrelationsArgs {
    #[arg(long)]
    run_dir: PathBuf,
    /// Comma-separated per-tract fields, for example mean_V,r_g,median_age.
    #[arg(long, value_delimiter = ',')]
    fields: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags below override its settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    messages: Option<PathBuf>,
    #[arg(long)]
    tracts: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    sentiment_lexicon: Option<PathBuf>,
    #[arg(long)]
    vad_lexicon: Option<PathBuf>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Check-in count for the above-threshold cohort.
    #[arg(long)]
    threshold: Option<u64>,
    /// Let check-in announcements contribute to emotion means.
    #[arg(long)]
    include_checkins_in_emotion: bool,
    /// Compute mobility from check-in points only.
    #[arg(long)]
    rg_checkins_only: bool,
    /// Fail on the first malformed corpus line.
    #[arg(long)]
    strict: bool,
    /// Worker threads for per-message and per-user stages.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Synthetic city: messages, tracts, and a ground-truth sidecar.
    Generate(FixturesGenerateArgs),
}

#[derive(Args)]
struct FixturesGenerateArgs {
    /// Directory for messages.jsonl, tracts.geojson, and truth.json.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid width in tracts.
    #[arg(long)]
    cols: Option<usize>,
    /// Grid height in tracts.
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    residents_per_tract: Option<usize>,
    #[arg(long)]
    baseline_messages_per_tract: Option<usize>,
    #[arg(long)]
    venue_messages_per_tract: Option<usize>,
    /// How many tracts host check-in venues.
    #[arg(long)]
    venue_tracts: Option<usize>,
    /// How many venue tracts stay below three check-ins.
    #[arg(long)]
    low_tier_tracts: Option<usize>,
    /// Distance venue residents roam from home, in meters.
    #[arg(long)]
    displaced_distance_m: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(help_or_version) => {
            let _ = help_or_version.print();
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Localize(args) => cmd_localize(args),
        Command::Checkins(args) => cmd_checkins(args),
        Command::Score(args) => cmd_score(args),
        Command::Mobility(args) => cmd_mobility(args),
        Command::Test(args) => cmd_test(args),
        Command::Report(command) => match command {
            ReportCommand::Summary(args) => cmd_report_summary(args),
            ReportCommand::Geojson(args) => cmd_report_geojson(args),
            ReportCommand::Terms(args) => cmd_report_terms(args),
            ReportCommand::Correlations(args) => cmd_report_correlations(args),
        },
        Command::Run(args) => cmd_run(args),
        Command::Fixtures(FixturesCommand::Generate(args)) => cmd_fixtures_generate(args),
    }
}

/// Writes `content` to `out`, or to stdout when no path was given.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| Error::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::io(Path::new("<stdout>"), e))
        }
    }
}

fn localize_all(messages: &[GeoMessage], tracts: &Path) -> Result<BTreeMap<String, String>> {
    let tract_set = load_tracts(tracts)?;
    for warning in &tract_set.warnings {
        eprintln!("warning: {warning}");
    }
    let index = SpatialIndex::build(tract_set.geometries())?;
    Ok(messages
        .iter()
        .filter_map(|m| {
            index
                .locate(m.position())
                .map(|t| (m.message_id.clone(), t.to_string()))
        })
        .collect())
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let (messages, stats) = load_messages(&args.messages, args.strict)?;
    let mut buffer = Vec::new();
    write_messages(&mut buffer, &messages).map_err(|e| Error::io(&args.messages, e))?;
    let normalized =
        String::from_utf8(buffer).map_err(|e| Error::internal(format!("non-UTF-8 output: {e}")))?;
    emit(args.out.as_deref(), &normalized)?;
    eprintln!(
        "{} lines: {} accepted, {} rejected, {} duplicates dropped",
        stats.total_lines, stats.accepted, stats.rejected, stats.duplicates
    );
    Ok(())
}

fn cmd_localize(args: LocalizeArgs) -> Result<()> {
    let (messages, _) = load_messages(&args.messages, false)?;
    let assignments = localize_all(&messages, &args.tracts)?;
    let mut tsv = String::from("message_id\ttract_id\n");
    for m in &messages {
        let tract = assignments.get(&m.message_id).map_or("-", String::as_str);
        let _ = writeln!(tsv, "{}\t{}", m.message_id, tract);
    }
    emit(args.out.as_deref(), &tsv)
}

fn cmd_checkins(args: CheckinsArgs) -> Result<()> {
    let (messages, _) = load_messages(&args.messages, false)?;
    let assignments = match &args.tracts {
        Some(tracts) => localize_all(&messages, tracts)?,
        None => BTreeMap::new(),
    };
    let mut tsv = String::from("message_id\tvenue_name\tvenue_handle\tcity\tregion\ttract_id\n");
    for m in &messages {
        if let Some(fields) = parse_checkin(&m.text) {
            let dash = |v: Option<&str>| v.unwrap_or("-").to_string();
            let _ = writeln!(
                tsv,
                "{}\t{}\t{}\t{}\t{}\t{}",
                m.message_id,
                fields.venue_name,
                dash(fields.venue_handle.as_deref()),
                dash(fields.city.as_deref()),
                dash(fields.region.as_deref()),
                dash(assignments.get(&m.message_id).map(String::as_str)),
            );
        }
    }
    emit(args.out.as_deref(), &tsv)
}

fn cmd_score(args: ScoreArgs) -> Result<()> {
    let (messages, _) = load_messages(&args.messages, false)?;
    let sentiment_lexicon = sentiment_lexicon_from(args.sentiment_lexicon.as_ref())?;
    let vad_lexicon = vad_lexicon_from(args.vad_lexicon.as_ref())?;
    let mut tsv = String::from(
        "message_id\tpositive\tnegative\tvalence\tarousal\tdominance\tmatched_terms\n",
    );
    for m in &messages {
        let tokens = tokenize(&m.text);
        let sentiment = score_sentistrength(&tokens, &sentiment_lexicon);
        let vad = score_vad(&tokens, &vad_lexicon);
        let num = |v: Option<f64>| match v {
            Some(v) => format!("{v:.4}"),
            None => "-".into(),
        };
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.message_id,
            sentiment.positive,
            sentiment.negative,
            num(vad.as_ref().map(|v| v.valence)),
            num(vad.as_ref().map(|v| v.arousal)),
            num(vad.as_ref().map(|v| v.dominance)),
            vad.as_ref().map_or(0, |v| v.matched_terms),
        );
    }
    emit(args.out.as_deref(), &tsv)
}

fn cmd_mobility(args: MobilityArgs) -> Result<()> {
    let (messages, _) = load_messages(&args.messages, false)?;
    let mut points_by_user: BTreeMap<&str, Vec<LatLon>> = BTreeMap::new();
    for m in &messages {
        if args.checkins_only && parse_checkin(&m.text).is_none() {
            continue;
        }
        points_by_user
            .entry(m.user_id.as_str())
            .or_default()
            .push(m.position());
    }
    let mut user_mobilities: BTreeMap<String, UserMobility> = BTreeMap::new();
    for (user_id, points) in &points_by_user {
        let mobility = user_mobility(user_id, points)?;
        user_mobilities.insert(mobility.user_id.clone(), mobility);
    }
    let mut users_tsv = String::from("user_id\tn_points\tr_g_m\n");
    for m in user_mobilities.values() {
        let _ = writeln!(users_tsv, "{}\t{}\t{:.3}", m.user_id, m.n_points, m.radius_m);
    }

    let tracts_tsv = match &args.tracts {
        Some(tracts) => {
            let assignments = localize_all(&messages, tracts)?;
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
            let mut tsv = String::from("tract_id\tn_users\tmean_r_g_m\n");
            for t in geomood::mobility::tract_mobility(&user_mobilities, &posters)? {
                let _ = writeln!(tsv, "{}\t{}\t{:.3}", t.tract_id, t.n_users, t.mean_radius_m);
            }
            Some(tsv)
        }
        None => {
            if args.tracts_out.is_some() {
                return Err(Error::Config {
                    reason: "--tracts-out needs --tracts for the tract boundaries".into(),
                });
            }
            None
        }
    };

    match (&args.users_out, tracts_tsv) {
        (out, None) => emit(out.as_deref(), &users_tsv),
        (out, Some(tracts_tsv)) => {
            emit(out.as_deref(), &users_tsv)?;
            if args.tracts_out.is_none() && out.is_none() {
                // Both blocks on stdout: separate them with a blank line.
                emit(None, "\n")?;
            }
            emit(args.tracts_out.as_deref(), &tracts_tsv)
        }
    }
}

fn parse_sides(sides: &str) -> Result<Sides> {
    match sides {
        "two" => Ok(Sides::Two),
        "one" => Ok(Sides::One),
        other => Err(Error::UnknownName {
            kind: "sides",
            name: other.to_string(),
            expected: "one, two".into(),
        }),
    }
}

fn format_p(p: f64) -> String {
    if p >= 0.001 {
        format!("{p:.4}")
    } else {
        format!("{p:.3e}")
    }
}

fn cmd_test(args: TestArgs) -> Result<()> {
    let aggregates = read_aggregates_tsv(&args.run_dir.join("tract_aggregates.tsv"))?;
    let cohorts = build_cohorts(&aggregates, args.threshold)?;
    let cohort_a = cohorts.by_key(&args.cohort_a)?;
    let cohort_b = cohorts.by_key(&args.cohort_b)?;
    let sides = parse_sides(&args.sides)?;

    let (x, y, unit) = if args.pooled {
        let scores = read_scores_tsv(&args.run_dir.join("scores.tsv"))?;
        let assignments = read_localized_tsv(&args.run_dir.join("localized.tsv"))?;
        let checkin_ids = read_checkin_message_ids(&args.run_dir.join("checkins.tsv"))?;
        // The interchange files carry no user ids; pooling never uses them.
        let scored: Vec<ScoredMessage> = scores
            .into_iter()
            .map(|(message_id, sentiment, vad)| ScoredMessage {
                is_checkin: checkin_ids.contains(&message_id),
                message_id,
                user_id: String::new(),
                sentiment,
                vad,
            })
            .collect();
        let x = pooled_emotion_values(&scored, &assignments, cohort_a, &args.metric)?;
        let y = pooled_emotion_values(&scored, &assignments, cohort_b, &args.metric)?;
        (x, y, "messages")
    } else {
        let x = cohort_metric_values(&aggregates, cohort_a, &args.metric)?;
        let y = cohort_metric_values(&aggregates, cohort_b, &args.metric)?;
        (x, y, "tracts")
    };

    let result = rank_sum_test(&x, &y, sides)?;
    let describe = |c: &Cohort, n: usize| format!("{} ({n} {unit})", c.name);
    let mut out = String::new();
    let _ = writeln!(out, "metric:    {}", args.metric);
    let _ = writeln!(out, "sample A:  {}", describe(cohort_a, x.len()));
    let _ = writeln!(out, "sample B:  {}", describe(cohort_b, y.len()));
    let method = match result.method {
        RankSumMethod::Exact => "exact enumeration",
        RankSumMethod::NormalApprox => "normal approximation",
    };
    let sides_label = match sides {
        Sides::Two => "two-sided",
        Sides::One => "one-sided",
    };
    let _ = writeln!(out, "U = {}", result.u_statistic);
    let _ = writeln!(out, "z = {:.4}", result.z_value);
    let _ = writeln!(out, "p = {} ({sides_label}, {method})", format_p(result.p_value));
    if result.degenerate {
        let _ = writeln!(out, "note: all pooled values identical; comparison is uninformative");
    }
    let verdict = if result.p_value < 0.05 { "yes" } else { "no" };
    let _ = writeln!(out, "significant at alpha 0.05: {verdict}");
    if args.welch {
        let t = welch_t_test(&x, &y, sides)?;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "Welch t = {:.4}, df = {:.1}, p = {} ({sides_label})",
            t.t_value,
            t.degrees_of_freedom,
            format_p(t.p_value)
        );
    }
    emit(None, &out)
}

fn cmd_report_summary(args: ReportSummaryArgs) -> Result<()> {
    let aggregates = read_aggregates_tsv(&args.run_dir.join("tract_aggregates.tsv"))?;
    let cohorts = build_cohorts(&aggregates, args.threshold)?;
    let summary = summarize(&aggregates, &cohorts);
    emit(args.out.as_deref(), &summary_csv(&summary))
}

fn cmd_report_geojson(args: ReportGeojsonArgs) -> Result<()> {
    let aggregates = read_aggregates_tsv(&args.run_dir.join("tract_aggregates.tsv"))?;
    let tract_set = load_tracts(&args.tracts)?;
    let geojson = metric_overlay_geojson(&tract_set.tracts, &aggregates, &args.metric)?;
    emit(args.out.as_deref(), &geojson)
}

fn cmd_report_terms(args: ReportTermsArgs) -> Result<()> {
    let (messages, _) = load_messages(&args.messages, false)?;
    let assignments = read_localized_tsv(&args.run_dir.join("localized.tsv"))?;
    let stopwords = stopwords_from(args.stopwords.as_ref())?;
    let texts: Vec<(String, String)> = messages
        .into_iter()
        .map(|m| (m.message_id, m.text))
        .collect();
    let frequencies = term_frequencies(&texts, &assignments, &args.tract, &stopwords)?;
    let mut tsv = String::from("term\tcount\n");
    for (term, count) in frequencies.iter().take(args.top) {
        let _ = writeln!(tsv, "{term}\t{count}");
    }
    emit(args.out.as_deref(), &tsv)
}

fn cmd_report_correlations(args: ReportCorrelationsArgs) -> Result<()> {
    let aggregates = read_aggregates_tsv(&args.run_dir.join("tract_aggregates.tsv"))?;
    let matrix = correlation_matrix(&aggregates, &args.fields)?;
    emit(args.out.as_deref(), &matrix.to_csv())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let file_overlay = match &args.config {
        Some(path) => ConfigOverlay::from_toml_file(path)?,
        None => ConfigOverlay::default(),
    };
    let flag_overlay = ConfigOverlay {
        messages: args.messages,
        tracts: args.tracts,
        out_dir: args.out_dir,
        sentiment_lexicon: args.sentiment_lexicon,
        vad_lexicon: args.vad_lexicon,
        stopwords: args.stopwords,
        cohort_threshold: args.threshold,
        include_checkins_in_emotion: args.include_checkins_in_emotion.then_some(true),
        rg_checkins_only: args.rg_checkins_only.then_some(true),
        strict_ingest: args.strict.then_some(true),
        workers: args.workers,
    };
    let config = file_overlay.merged_with(flag_overlay).into_config()?;
    let run = run_pipeline(&config)?;
    let stages = &run.manifest.stages;
    let mut out = String::new();
    if let Some(s) = stages.ingest {
        let _ = writeln!(
            out,
            "ingest:    {} accepted, {} rejected, {} duplicates",
            s.accepted, s.rejected, s.duplicates
        );
    }
    if let Some(s) = stages.localize {
        let _ = writeln!(out, "localize:  {} localized, {} outside", s.localized, s.unlocalized);
    }
    if let Some(s) = stages.checkins {
        let _ = writeln!(out, "checkins:  {} found ({} localized)", s.found, s.localized);
    }
    if let Some(s) = stages.score {
        let _ = writeln!(
            out,
            "score:     {} scored, affect coverage {:.2}%",
            s.scored,
            s.coverage * 100.0
        );
    }
    if let Some(s) = stages.mobility {
        let _ = writeln!(out, "mobility:  {} users over {} tracts", s.users, s.tracts);
    }
    if let Some(s) = stages.aggregate {
        let _ = writeln!(
            out,
            "cohorts:   {} tracts; {} with check-ins; {} at/above threshold",
            s.cohort_all, s.cohort_with_checkins, s.cohort_above_threshold
        );
    }
    let _ = writeln!(out, "outputs:   {}", config.out_dir.display());
    emit(None, &out)
}

fn cmd_fixtures_generate(args: FixturesGenerateArgs) -> Result<()> {
    use geomood::fixtures::{synthetic_city, CityParams};
    let mut params = CityParams::default();
    if let Some(v) = args.seed {
        params.seed = v;
        params.grid.seed = v;
    }
    if let Some(v) = args.cols {
        params.grid.cols = v;
    }
    if let Some(v) = args.rows {
        params.grid.rows = v;
    }
    if let Some(v) = args.residents_per_tract {
        params.residents_per_tract = v;
    }
    if let Some(v) = args.baseline_messages_per_tract {
        params.baseline_messages_per_tract = v;
    }
    if let Some(v) = args.venue_messages_per_tract {
        params.venue_home_messages_per_tract = v;
    }
    if let Some(v) = args.venue_tracts {
        params.venue_tract_count = v;
    }
    if let Some(v) = args.low_tier_tracts {
        params.low_tier_count = v;
    }
    if let Some(v) = args.displaced_distance_m {
        params.displaced_distance_m = v;
    }
    let city = synthetic_city(&params)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let paths = city.write_to_dir(&args.out_dir)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "messages: {} ({} messages, {} users)",
        paths.messages.display(),
        city.truth.n_messages,
        city.truth.n_users
    );
    let _ = writeln!(
        out,
        "tracts:   {} ({} tracts, {} with venues)",
        paths.tracts.display(),
        city.truth.n_tracts,
        city.truth.venue_tracts.len()
    );
    let _ = writeln!(out, "truth:    {}", paths.truth.display());
    emit(None, &out)
}
