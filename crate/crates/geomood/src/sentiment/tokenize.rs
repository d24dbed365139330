//! Social-media tokenizer.
//!
//! Splits text into typed tokens — words, emoticons, URLs, mentions,
//! hashtag words, and punctuation — while preserving every non-whitespace
//! character: concatenating the token surfaces in order reproduces the
//! input with its whitespace removed.
//!
//! Each token also carries a `normalized` form (lowercased, with letter
//! runs of three or more collapsed to two, curly apostrophes straightened)
//! and an `elongated` flag for expressive lengthening ("loooove").

/// Lexical class of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Emoticon,
    Url,
    Mention,
    HashtagWord,
    Punctuation,
}

/// One token: the exact surface slice plus its normalized form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub kind: TokenKind,
    pub elongated: bool,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Lowercases and collapses letter runs: runs of three or more identical
/// letters shrink to two. Also straightens curly apostrophes. Returns the
/// normalized string and whether any run was collapsed.
fn normalize_word(surface: &str) -> (String, bool) {
    let lower: String = surface
        .to_lowercase()
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    let mut out = String::with_capacity(lower.len());
    let mut elongated = false;
    let mut run_char = '\0';
    let mut run_len = 0usize;
    for c in lower.chars() {
        if c == run_char && c.is_alphabetic() {
            run_len += 1;
        } else {
            run_char = c;
            run_len = 1;
        }
        if run_len < 3 {
            out.push(c);
        } else {
            elongated = true;
        }
    }
    (out, elongated)
}

/// Variant spellings to try when a lookup on the normalized form misses:
/// every combination of collapsing each elongated letter run to two or to
/// one, most conservative first. The first entry is always the normalized
/// form itself.
pub fn elongation_variants(surface: &str) -> Vec<String> {
    let lower: String = surface
        .to_lowercase()
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    // Runs of identical letters with length >= 3, as (char, run_len) pieces.
    let mut pieces: Vec<(char, usize)> = Vec::new();
    for c in lower.chars() {
        match pieces.last_mut() {
            Some((pc, n)) if *pc == c && c.is_alphabetic() => *n += 1,
            _ => pieces.push((c, 1)),
        }
    }
    let long_runs: Vec<usize> = pieces
        .iter()
        .enumerate()
        .filter(|(_, (_, n))| *n >= 3)
        .map(|(i, _)| i)
        .collect();
    let mut variants = Vec::new();
    // Choice bitmask: bit set = collapse that run to 1, clear = to 2.
    for mask in 0..(1u32 << long_runs.len().min(16)) {
        let mut s = String::with_capacity(lower.len());
        for (i, (c, n)) in pieces.iter().enumerate() {
            let reps = match long_runs.iter().position(|&r| r == i) {
                Some(bit) => {
                    if mask & (1 << bit) != 0 {
                        1
                    } else {
                        2
                    }
                }
                None => *n,
            };
            for _ in 0..reps {
                s.push(*c);
            }
        }
        if !variants.contains(&s) {
            variants.push(s);
        }
    }
    variants
}

const EMOTICON_EYES: [char; 3] = [':', ';', '='];
const EMOTICON_NOSE: [char; 3] = ['-', '^', '\''];
const EMOTICON_MOUTH: [char; 15] = [
    ')', '(', 'D', 'P', 'p', 'd', '/', '\\', '|', 'O', 'o', '*', '3', '[', ']',
];

/// Tries to read an emoticon at the start of `rest`.
///
/// Returns `(surface_len_bytes, normalized)`; a repeated mouth character
/// marks the emoticon as elongated and normalizes to a single mouth.
fn match_emoticon(rest: &str) -> Option<(usize, String, bool)> {
    for literal in ["</3", "<3", "D:"] {
        if rest.starts_with(literal) {
            return Some((literal.len(), literal.to_string(), false));
        }
    }
    let mut chars = rest.chars();
    let eye = chars.next()?;
    if !EMOTICON_EYES.contains(&eye) {
        return None;
    }
    let mut len = eye.len_utf8();
    let mut normalized = String::new();
    normalized.push(eye);
    let mut next = chars.next()?;
    if EMOTICON_NOSE.contains(&next) {
        // A nose must still be followed by a mouth.
        let after = chars.clone().next()?;
        if EMOTICON_MOUTH.contains(&after) {
            len += next.len_utf8();
            normalized.push(next);
            next = chars.next()?;
        }
    }
    if !EMOTICON_MOUTH.contains(&next) {
        return None;
    }
    let mouth = next;
    normalized.push(mouth);
    len += mouth.len_utf8();
    let mut repeats = 0usize;
    for c in chars {
        if c == mouth {
            repeats += 1;
            len += c.len_utf8();
        } else {
            break;
        }
    }
    // A word character right after rules the match out: "I:d" inside a word
    // would otherwise shadow ordinary text. Mouth letters followed by more
    // letters ("=Dog"?) are also rejected.
    let tail = &rest[len..];
    if mouth.is_ascii_alphabetic() {
        if tail.chars().next().is_some_and(is_word_char) {
            return None;
        }
    }
    Some((len, normalized, repeats >= 1))
}

fn url_len(rest: &str) -> Option<usize> {
    let lower: String = rest.chars().take(8).collect::<String>().to_lowercase();
    if !(lower.starts_with("http://") || lower.starts_with("https://")) {
        return None;
    }
    Some(
        rest.char_indices()
            .find(|(_, c)| c.is_whitespace())
            .map(|(i, _)| i)
            .unwrap_or(rest.len()),
    )
}

/// Reads a word starting at the beginning of `rest` (first char must be a
/// word char). Interior apostrophes are part of the word ("don't"); leading
/// or trailing ones are not.
fn word_len(rest: &str) -> usize {
    let mut len = 0usize;
    let mut chars = rest.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if is_word_char(c) {
            len = i + c.len_utf8();
        } else if is_apostrophe(c) {
            match chars.peek() {
                Some((_, n)) if is_word_char(*n) => {
                    // interior apostrophe; loop will extend over the next char
                }
                _ => break,
            }
        } else {
            break;
        }
    }
    len
}

fn make_word(surface: &str, kind: TokenKind) -> Token {
    let core = match kind {
        TokenKind::HashtagWord => &surface[1..],
        TokenKind::Mention => &surface[1..],
        _ => surface,
    };
    let (normalized, elongated) = normalize_word(core);
    Token {
        surface: surface.to_string(),
        normalized,
        kind,
        elongated,
    }
}

/// Tokenizes `text`.
///
/// ```
/// use geomood::sentiment::{tokenize, TokenKind};
///
/// let tokens = tokenize("@ana I loooove #LA :) http://t.co/x");
/// let kinds: Vec<TokenKind> = tokens.iter().map(|t| t.kind).collect();
/// assert_eq!(kinds, vec![
///     TokenKind::Mention,
///     TokenKind::Word,
///     TokenKind::Word,
///     TokenKind::HashtagWord,
///     TokenKind::Emoticon,
///     TokenKind::Url,
/// ]);
/// assert_eq!(tokens[2].normalized, "loove");
/// assert!(tokens[2].elongated);
/// ```
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            let ws = rest
                .char_indices()
                .find(|(_, c)| !c.is_whitespace())
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            rest = &rest[ws..];
            continue;
        }
        if let Some(len) = url_len(rest) {
            let surface = &rest[..len];
            tokens.push(Token {
                surface: surface.to_string(),
                normalized: surface.to_lowercase(),
                kind: TokenKind::Url,
                elongated: false,
            });
            rest = &rest[len..];
            continue;
        }
        if let Some((len, normalized, elongated)) = match_emoticon(rest) {
            tokens.push(Token {
                surface: rest[..len].to_string(),
                normalized,
                kind: TokenKind::Emoticon,
                elongated,
            });
            rest = &rest[len..];
            continue;
        }
        if c == '@' || c == '#' {
            let after = &rest[c.len_utf8()..];
            let w = word_len(after);
            if w > 0 {
                let total = c.len_utf8() + w;
                let kind = if c == '@' {
                    TokenKind::Mention
                } else {
                    TokenKind::HashtagWord
                };
                tokens.push(make_word(&rest[..total], kind));
                rest = &rest[total..];
                continue;
            }
        }
        if is_word_char(c) {
            let w = word_len(rest);
            tokens.push(make_word(&rest[..w], TokenKind::Word));
            rest = &rest[w..];
            continue;
        }
        // Punctuation: extend over chars that cannot start any other token.
        let mut len = 0usize;
        for (i, pc) in rest.char_indices() {
            if i > 0 {
                let tail = &rest[i..];
                if pc.is_whitespace()
                    || is_word_char(pc)
                    || pc == '@'
                    || pc == '#'
                    || url_len(tail).is_some()
                    || match_emoticon(tail).is_some()
                {
                    break;
                }
            }
            len = i + pc.len_utf8();
        }
        let surface = &rest[..len];
        tokens.push(Token {
            surface: surface.to_string(),
            normalized: surface.to_lowercase(),
            kind: TokenKind::Punctuation,
            elongated: false,
        });
        rest = &rest[len..];
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_ws(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    #[test]
    fn surfaces_reassemble_the_input() {
        for text in [
            "I love this!!",
            "@ana check #sunset :) http://t.co/abc",
            "soooo goooood :))) #winning",
            "odd   spacing\tand\nnewlines",
            "emoji 😀 and ünïcode wörds",
            "trailing apostrophe' and 'leading",
        ] {
            let tokens = tokenize(text);
            let joined: String = tokens.iter().map(|t| t.surface.as_str()).collect();
            assert_eq!(joined, strip_ws(text), "loss-free failed on {text:?}");
        }
    }

    #[test]
    fn classifies_the_basic_kinds() {
        let tokens = tokenize("@ana I loooove #LA :) http://t.co/x !!");
        let kinds: Vec<TokenKind> = tokens.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Mention,
                TokenKind::Word,
                TokenKind::Word,
                TokenKind::HashtagWord,
                TokenKind::Emoticon,
                TokenKind::Url,
                TokenKind::Punctuation,
            ]
        );
    }

    #[test]
    fn word_normalization_lowercases_and_collapses() {
        let t = &tokenize("LOOOOVE")[0];
        assert_eq!(t.surface, "LOOOOVE");
        assert_eq!(t.normalized, "loove");
        assert!(t.elongated);

        let t = &tokenize("book")[0];
        assert_eq!(t.normalized, "book");
        assert!(!t.elongated, "natural doubles are not elongation");

        let t = &tokenize("Großer")[0];
        assert_eq!(t.normalized, "großer");
    }

    #[test]
    fn elongation_variants_cover_two_and_one() {
        assert_eq!(elongation_variants("loooove"), vec!["loove", "love"]);
        let haaappy = elongation_variants("haaappy");
        assert!(haaappy.contains(&"haappy".to_string()));
        assert!(haaappy.contains(&"happy".to_string()));
        assert_eq!(elongation_variants("calm"), vec!["calm"]);
        // Multiple runs expand combinatorially.
        let v = elongation_variants("sooooo coool".replace(' ', "").as_str());
        assert!(v.len() >= 4);
    }

    #[test]
    fn apostrophes_stay_inside_words() {
        let tokens = tokenize("don't can't o'clock");
        assert!(tokens.iter().all(|t| t.kind == TokenKind::Word));
        assert_eq!(tokens[0].normalized, "don't");

        let curly = tokenize("don\u{2019}t");
        assert_eq!(curly[0].normalized, "don't", "curly apostrophe straightened");

        let tokens = tokenize("'quoted'");
        assert_eq!(
            tokens.iter().map(|t| t.kind).collect::<Vec<_>>(),
            vec![TokenKind::Punctuation, TokenKind::Word, TokenKind::Punctuation]
        );
    }

    #[test]
    fn hashtags_and_mentions_normalize_their_word_part() {
        let t = &tokenize("#Loooove")[0];
        assert_eq!(t.kind, TokenKind::HashtagWord);
        assert_eq!(t.normalized, "loove");
        assert!(t.elongated);

        let t = &tokenize("@UserName")[0];
        assert_eq!(t.kind, TokenKind::Mention);
        assert_eq!(t.normalized, "username");

        // Bare sigils are punctuation.
        assert_eq!(tokenize("@ !")[0].kind, TokenKind::Punctuation);
        assert_eq!(tokenize("# !")[0].kind, TokenKind::Punctuation);
    }

    #[test]
    fn emoticon_forms_and_elongation() {
        let t = &tokenize(":)")[0];
        assert_eq!(t.kind, TokenKind::Emoticon);
        assert_eq!(t.normalized, ":)");
        assert!(!t.elongated);

        let t = &tokenize(":)))")[0];
        assert_eq!(t.surface, ":)))");
        assert_eq!(t.normalized, ":)", "repeated mouth collapses");
        assert!(t.elongated);

        for s in [":-)", ";)", ":D", ":P", ":(", ":'(", "D:", "<3", "</3", ":/"] {
            let tokens = tokenize(s);
            assert_eq!(tokens.len(), 1, "{s:?} should be one token");
            assert_eq!(tokens[0].kind, TokenKind::Emoticon, "{s:?}");
        }
    }

    #[test]
    fn emoticons_embedded_in_punctuation_are_found() {
        let tokens = tokenize("wow!!:)ok");
        let kinds: Vec<TokenKind> = tokens.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::Word,
                TokenKind::Punctuation,
                TokenKind::Emoticon,
                TokenKind::Word
            ]
        );
    }

    #[test]
    fn letter_mouths_do_not_eat_words() {
        // ":Dog" would be a bogus emoticon; the 'D' belongs to a word.
        let tokens = tokenize(":Dog");
        assert_eq!(tokens[0].kind, TokenKind::Punctuation);
        assert_eq!(tokens[0].surface, ":");
        assert_eq!(tokens[1].kind, TokenKind::Word);
    }

    #[test]
    fn urls_consume_to_whitespace_and_never_normalize_away() {
        let tokens = tokenize("see HTTPS://T.co/AbC?x=1#frag, now");
        assert_eq!(tokens[1].kind, TokenKind::Url);
        assert_eq!(tokens[1].surface, "HTTPS://T.co/AbC?x=1#frag,");
        assert_eq!(tokens[2].surface, "now");
    }

    #[test]
    fn empty_and_whitespace_inputs_yield_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" \t\n ").is_empty());
    }
}
