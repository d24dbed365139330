//! geomood — batch analytics for geo-tagged short messages.
//!
//! The library localizes messages to census tracts, detects venue check-in
//! announcements, scores message emotion against bundled lexicons, measures
//! user mobility (radius of gyration), and compares tract cohorts with
//! nonparametric statistics. Everything is deterministic: the same inputs and
//! configuration produce byte-identical outputs regardless of worker count.
//!
//! The high-level entry point is [`pipeline::run_pipeline`]; each stage is
//! also usable on its own:
//!
//! ```
//! use geomood::ingest::SentimentLexicon;
//! use geomood::sentiment::{tokenize, score_sentistrength};
//!
//! let lexicon = SentimentLexicon::bundled();
//! let tokens = tokenize("I looooove this place :)");
//! let score = score_sentistrength(&tokens, &lexicon);
//! assert!(score.positive >= 3);
//! assert_eq!(score.negative, -1);
//! ```

pub mod checkin;
pub mod error;
pub mod fixtures;
pub mod geo;
pub mod ingest;
pub mod mobility;
pub mod pipeline;
pub mod report;
pub mod sentiment;
pub mod stats;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Every code block in the guide (`book/`) compiles and runs here, so the
/// prose can never drift from the API.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(data_model, "../../../book/src/data-model.md");
    chapter!(checkins, "../../../book/src/checkins.md");
    chapter!(localization, "../../../book/src/localization.md");
    chapter!(emotion, "../../../book/src/emotion.md");
    chapter!(mobility, "../../../book/src/mobility.md");
    chapter!(statistics, "../../../book/src/statistics.md");
    chapter!(reports, "../../../book/src/reports.md");
    chapter!(pipeline, "../../../book/src/pipeline.md");
}
