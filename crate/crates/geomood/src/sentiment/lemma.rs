//! Rule-based lemmatizer.
//!
//! Produces an ordered list of candidate lemmas for a lowercase word: the
//! word itself, an irregular-form exception when one is known, then
//! suffix-stripping guesses (`-ies`, `-es`, `-s`, `-ing`, `-ed`). Lookups
//! take the first candidate found in whatever lexicon they consult, so the
//! order encodes rule priority.

use std::collections::HashMap;

/// Lemma-candidate generator with a small irregular-form table.
#[derive(Debug, Clone)]
pub struct Lemmatizer {
    exceptions: HashMap<String, String>,
}

impl Default for Lemmatizer {
    fn default() -> Self {
        Lemmatizer::from_exceptions_tsv(include_str!("../../data/lemma_exceptions.tsv"))
    }
}

impl Lemmatizer {
    /// Builds from `form<TAB>lemma` lines; blank lines and `#` comments are
    /// ignored, malformed lines are skipped.
    pub fn from_exceptions_tsv(text: &str) -> Lemmatizer {
        let exceptions = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(|l| {
                l.split_once('\t')
                    .map(|(form, lemma)| (form.trim().to_lowercase(), lemma.trim().to_lowercase()))
            })
            .filter(|(form, lemma)| !form.is_empty() && !lemma.is_empty())
            .collect();
        Lemmatizer { exceptions }
    }

    /// Ordered, deduplicated lemma candidates for a lowercase word.
    ///
    /// ```
    /// use geomood::sentiment::Lemmatizer;
    ///
    /// let lemmatizer = Lemmatizer::default();
    /// assert_eq!(lemmatizer.candidates("parties"), vec!["parties", "party"]);
    /// assert!(lemmatizer.candidates("running").contains(&"run".to_string()));
    /// assert_eq!(lemmatizer.candidates("went"), vec!["went", "go"]);
    /// ```
    pub fn candidates(&self, word: &str) -> Vec<String> {
        let mut out = vec![word.to_string()];
        let push = |mut v: Vec<String>, s: String| {
            if !s.is_empty() && !v.contains(&s) {
                v.push(s);
            }
            v
        };
        if let Some(lemma) = self.exceptions.get(word) {
            out = push(out, lemma.clone());
        }
        let n = word.len();
        if let Some(stem) = word.strip_suffix("ies") {
            if n > 4 {
                out = push(out, format!("{stem}y"));
            }
        } else if word.ends_with("es") && n >= 4 {
            out = push(out, word[..n - 1].to_string()); // caves -> cave
            out = push(out, word[..n - 2].to_string()); // boxes -> box
        } else if word.ends_with('s') && !word.ends_with("ss") && n >= 3 {
            out = push(out, word[..n - 1].to_string()); // smiles -> smile? no: smiles ends 'es'; cats -> cat
        } else if let Some(stem) = word.strip_suffix("ing") {
            if n >= 6 {
                out = push(out, stem.to_string()); // walking -> walk
                out = push(out, undouble(stem)); // running -> run
                out = push(out, format!("{stem}e")); // loving -> love
            }
        } else if word.ends_with("ed") && n >= 5 {
            out = push(out, word[..n - 1].to_string()); // loved -> love
            let stem = &word[..n - 2];
            out = push(out, stem.to_string()); // jumped -> jump
            out = push(out, undouble(stem)); // stopped -> stop
        }
        out
    }
}

/// Drops the second of a doubled trailing consonant ("runn" → "run").
fn undouble(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    match chars.as_slice() {
        [.., a, b] if a == b && a.is_alphabetic() && !"aeiou".contains(*a) => {
            chars[..chars.len() - 1].iter().collect()
        }
        _ => stem.to_string(),
    }
}
