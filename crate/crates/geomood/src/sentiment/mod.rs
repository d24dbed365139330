//! Message emotion scoring.
//!
//! Two complementary measures over the same token stream:
//!
//! * [`score_sentistrength`] — dual polarity strengths: a positive score in
//!   `[1, 5]` and a negative score in `[-5, -1]`, driven by the
//!   [`crate::ingest::SentimentLexicon`] term/booster/negator/emoticon/idiom
//!   tables.
//! * [`score_vad`] — mean valence/arousal/dominance norms (1..9 scale) over
//!   the words found in the [`crate::ingest::VadLexicon`], or `None` when
//!   nothing matched.
//!
//! Both build on [`tokenize`], which types tokens and never loses a
//! character, and [`Lemmatizer`], which maps inflected forms onto lexicon
//! lemmas.

mod lemma;
mod strength;
mod tokenize;
mod vad;

pub use lemma::Lemmatizer;
pub use strength::{score_sentistrength, SentimentScore};
pub use tokenize::{elongation_variants, tokenize, Token, TokenKind};
pub use vad::{lexicon_coverage, score_vad, score_vad_with, VadScore};
