//! Dimensional affect scoring: valence, arousal, dominance.
//!
//! A message's score is the arithmetic mean of the norms of every word the
//! lexicon recognizes (after lemmatization and elongation repair). Messages
//! with no recognized word have no score at all — they are skipped, never
//! treated as neutral.

use super::lemma::Lemmatizer;
use super::tokenize::{elongation_variants, Token, TokenKind};
use crate::error::Error;
use crate::ingest::{Vad, VadLexicon};
use crate::Result;
use std::sync::OnceLock;

/// Mean affect norms over the matched words of one message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VadScore {
    pub valence: f64,
    pub arousal: f64,
    pub dominance: f64,
    /// Number of token matches contributing to the mean.
    pub matched_terms: u64,
}

fn default_lemmatizer() -> &'static Lemmatizer {
    static LEMMATIZER: OnceLock<Lemmatizer> = OnceLock::new();
    LEMMATIZER.get_or_init(Lemmatizer::default)
}

/// Resolves one token to a lexicon entry, trying lemma candidates of the
/// normalized form first and elongation-repaired variants after.
fn match_token<'a>(
    token: &Token,
    lexicon: &'a VadLexicon,
    lemmatizer: &Lemmatizer,
) -> Option<&'a Vad> {
    if !matches!(token.kind, TokenKind::Word | TokenKind::HashtagWord) {
        return None;
    }
    let mut forms = vec![token.normalized.clone()];
    if token.elongated {
        let stripped = match token.kind {
            TokenKind::HashtagWord => token.surface.chars().skip(1).collect::<String>(),
            _ => token.surface.clone(),
        };
        for variant in elongation_variants(&stripped) {
            if !forms.contains(&variant) {
                forms.push(variant);
            }
        }
    }
    for form in &forms {
        for candidate in lemmatizer.candidates(form) {
            if let Some(vad) = lexicon.entries.get(&candidate) {
                return Some(vad);
            }
        }
    }
    None
}

/// Scores tokens with an explicit lemmatizer.
pub fn score_vad_with(
    tokens: &[Token],
    lexicon: &VadLexicon,
    lemmatizer: &Lemmatizer,
) -> Option<VadScore> {
    let mut sum = Vad {
        valence: 0.0,
        arousal: 0.0,
        dominance: 0.0,
    };
    let mut matched = 0u64;
    for token in tokens {
        if let Some(vad) = match_token(token, lexicon, lemmatizer) {
            sum.valence += vad.valence;
            sum.arousal += vad.arousal;
            sum.dominance += vad.dominance;
            matched += 1;
        }
    }
    (matched > 0).then(|| {
        let n = matched as f64;
        VadScore {
            valence: sum.valence / n,
            arousal: sum.arousal / n,
            dominance: sum.dominance / n,
            matched_terms: matched,
        }
    })
}

/// Scores tokens with the bundled lemmatizer.
///
/// ```
/// use geomood::ingest::VadLexicon;
/// use geomood::sentiment::{tokenize, score_vad};
///
/// let lexicon = VadLexicon::bundled();
/// let score = score_vad(&tokenize("happy happy day"), &lexicon).unwrap();
/// assert_eq!(score.matched_terms, 3);
/// assert!((score.valence - (8.21 + 8.21 + 6.81) / 3.0).abs() < 1e-12);
///
/// assert!(score_vad(&tokenize("qwertyuiop"), &lexicon).is_none());
/// ```
pub fn score_vad(tokens: &[Token], lexicon: &VadLexicon) -> Option<VadScore> {
    score_vad_with(tokens, lexicon, default_lemmatizer())
}

/// Fraction of messages with at least one recognized affect word.
///
/// Errors on an empty corpus — coverage of nothing is undefined.
pub fn lexicon_coverage(texts: &[impl AsRef<str>], lexicon: &VadLexicon) -> Result<f64> {
    if texts.is_empty() {
        return Err(Error::EmptyInput {
            what: "corpus for coverage".into(),
        });
    }
    let lemmatizer = default_lemmatizer();
    let covered = texts
        .iter()
        .filter(|text| {
            super::tokenize(text.as_ref())
                .iter()
                .any(|t| match_token(t, lexicon, lemmatizer).is_some())
        })
        .count();
    Ok(covered as f64 / texts.len() as f64)
}
