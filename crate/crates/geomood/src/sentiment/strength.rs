//! Dual-polarity sentence scoring.
//!
//! Every text gets two scores at once: a positive strength in `[1, 5]` and
//! a negative strength in `[-5, -1]`, where `(1, -1)` is fully neutral.
//! Scoring walks the token stream applying, in order: idiom spans, term and
//! emoticon strengths, booster offsets, negation, and an elongation bonus;
//! the sentence scores are the extremes over the per-token results.
//!
//! Boosters and negators act on the *lexicon-relevant* subsequence (scored
//! terms, boosters, negators), so interleaving words the lexicon does not
//! know never changes a score.

use super::tokenize::{elongation_variants, Token, TokenKind};
use crate::ingest::SentimentLexicon;

/// A dual sentiment score: `positive` in `[1, 5]`, `negative` in `[-5, -1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentimentScore {
    pub positive: i8,
    pub negative: i8,
}

impl SentimentScore {
    pub const NEUTRAL: SentimentScore = SentimentScore {
        positive: 1,
        negative: -1,
    };
}

/// How one token participates in scoring.
#[derive(Debug, Clone, PartialEq)]
enum Role {
    /// Carries a base strength; remembers elongation for the bonus rule.
    Scored { strength: i8, elongated: bool },
    /// Fixed-strength idiom span; boosters/negation/elongation do not apply.
    Idiom { strength: i8 },
    Booster(i8),
    Negator,
}

/// Looks a word token up in a term map, falling back to elongation variants.
fn lookup_term<'a, V>(
    map: &'a std::collections::HashMap<String, V>,
    token: &Token,
) -> Option<&'a V> {
    if let Some(v) = map.get(&token.normalized) {
        return Some(v);
    }
    if token.elongated {
        for variant in elongation_variants(&token.surface_word()) {
            if let Some(v) = map.get(&variant) {
                return Some(v);
            }
        }
    }
    None
}

impl Token {
    /// The surface with any `#`/`@` sigil removed, for variant generation.
    fn surface_word(&self) -> String {
        match self.kind {
            TokenKind::HashtagWord | TokenKind::Mention => {
                self.surface.chars().skip(1).collect()
            }
            _ => self.surface.clone(),
        }
    }
}

/// Scores a token stream against the lexicon.
///
/// ```
/// use geomood::ingest::SentimentLexicon;
/// use geomood::sentiment::{tokenize, score_sentistrength};
///
/// let lexicon = SentimentLexicon::bundled();
/// let score = score_sentistrength(&tokenize("I very much love it, but I hate the wait"), &lexicon);
/// assert_eq!(score.positive, 4); // love (3) boosted by "very"
/// assert_eq!(score.negative, -4); // hate
///
/// let neutral = score_sentistrength(&tokenize("the train leaves at nine"), &lexicon);
/// assert_eq!((neutral.positive, neutral.negative), (1, -1));
/// ```
pub fn score_sentistrength(tokens: &[Token], lexicon: &SentimentLexicon) -> SentimentScore {
    // Word-ish view: indices of tokens that can participate at all.
    let wordish: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            matches!(
                t.kind,
                TokenKind::Word | TokenKind::HashtagWord | TokenKind::Emoticon
            )
        })
        .map(|(i, _)| i)
        .collect();

    // Idiom spans over consecutive word tokens (emoticons break a phrase),
    // longest phrase first at each position, left to right, non-overlapping.
    let mut idiom_sequences: Vec<(Vec<&str>, i8)> = lexicon
        .idioms
        .iter()
        .map(|(phrase, s)| (phrase.split(' ').collect::<Vec<_>>(), *s))
        .collect();
    idiom_sequences.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));

    let mut consumed = vec![false; tokens.len()];
    let mut idiom_at: Vec<Option<i8>> = vec![None; tokens.len()];
    let mut pos = 0usize;
    while pos < wordish.len() {
        let mut matched = false;
        for (words, strength) in &idiom_sequences {
            if pos + words.len() > wordish.len() {
                continue;
            }
            let span = &wordish[pos..pos + words.len()];
            let fits = span.iter().zip(words).all(|(&ti, w)| {
                tokens[ti].kind != TokenKind::Emoticon && tokens[ti].normalized == *w
            });
            if fits {
                for &ti in span {
                    consumed[ti] = true;
                }
                idiom_at[wordish[pos]] = Some(*strength);
                pos += words.len();
                matched = true;
                break;
            }
        }
        if !matched {
            pos += 1;
        }
    }

    // Build the lexicon-relevant subsequence.
    let mut relevant: Vec<Role> = Vec::new();
    for &ti in &wordish {
        let token = &tokens[ti];
        if consumed[ti] {
            if let Some(strength) = idiom_at[ti] {
                relevant.push(Role::Idiom { strength });
            }
            continue;
        }
        match token.kind {
            TokenKind::Emoticon => {
                if let Some(&s) = lexicon.emoticons.get(&token.normalized) {
                    relevant.push(Role::Scored {
                        strength: s,
                        elongated: token.elongated,
                    });
                }
            }
            _ => {
                if let Some(&s) = lookup_term(&lexicon.term_strengths, token) {
                    relevant.push(Role::Scored {
                        strength: s,
                        elongated: token.elongated,
                    });
                } else if let Some(&offset) = lookup_term(&lexicon.boosters, token) {
                    relevant.push(Role::Booster(offset));
                } else if lexicon.negators.contains(&token.normalized) {
                    relevant.push(Role::Negator);
                }
            }
        }
    }

    // Apply booster / negation / elongation rules per scored entry.
    let mut positive = 1i8;
    let mut negative = -1i8;
    for i in 0..relevant.len() {
        let (base, elongated) = match relevant[i] {
            Role::Scored {
                strength,
                elongated,
            } => (strength, elongated),
            Role::Idiom { strength } => {
                positive = positive.max(strength);
                negative = negative.min(strength);
                continue;
            }
            _ => continue,
        };
        let sign = if base > 0 { 1i8 } else { -1i8 };
        let mut magnitude = base.abs();
        if i >= 1 {
            if let Role::Booster(offset) = relevant[i - 1] {
                magnitude = (magnitude + offset).clamp(1, 5);
            }
        }
        let negated =
            (1..=2).any(|back| back <= i && matches!(relevant[i - back], Role::Negator));
        let mut value = sign * magnitude;
        if negated {
            value = if value > 0 {
                1
            } else {
                // Halve a negated negative toward -1: "not bad" is mild.
                -(magnitude / 2).max(1)
            };
        }
        if elongated {
            value = value.signum() * (value.abs() + 1).min(5);
        }
        positive = positive.max(value);
        negative = negative.min(value);
    }

    SentimentScore {
        positive: positive.clamp(1, 5),
        negative: negative.clamp(-5, -1),
    }
}
