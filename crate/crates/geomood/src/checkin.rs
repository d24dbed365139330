//! Detection of venue check-in announcements.
//!
//! A check-in is an auto-generated message of the shape
//!
//! ```text
//! I'm at [@handle] VENUE [- @handle] [(CITY, RG) | in CITY, RG] [URL]
//! ```
//!
//! where `RG` is a two-letter region code and the URL, when present, is the
//! final whitespace-delimited token. Parsing is case-insensitive on the
//! prefix, tolerant of the curly apostrophe, and total: any text either
//! yields exactly one [`CheckinFields`] or is not a check-in.

use std::collections::BTreeMap;

/// Fields recovered from a check-in announcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckinFields {
    pub venue_name: String,
    pub venue_handle: Option<String>,
    pub city: Option<String>,
    pub region: Option<String>,
    pub url: Option<String>,
}

/// A parsed check-in attached to its source message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckIn {
    pub message_id: String,
    pub fields: CheckinFields,
}

impl CheckinFields {
    pub fn with_message_id(self, message_id: impl Into<String>) -> CheckIn {
        CheckIn {
            message_id: message_id.into(),
            fields: self,
        }
    }

    /// Renders the canonical announcement text for these fields; feeding the
    /// result back to [`parse_checkin`] recovers the same fields.
    pub fn to_text(&self) -> String {
        let mut out = format!("I'm at {}", self.venue_name);
        if let Some(handle) = &self.venue_handle {
            out.push_str(" - @");
            out.push_str(handle);
        }
        if let (Some(city), Some(region)) = (&self.city, &self.region) {
            out.push_str(&format!(" ({city}, {region})"));
        }
        if let Some(url) = &self.url {
            out.push(' ');
            out.push_str(url);
        }
        out
    }
}

const PREFIXES: [&str; 3] = ["i'm at ", "i\u{2019}m at ", "im at "];

fn strip_prefix_ci(text: &str) -> Option<&str> {
    for prefix in PREFIXES {
        // `get` (not `split_at`) so a multibyte character straddling the
        // prefix length cannot panic.
        if let Some(head) = text.get(..prefix.len()) {
            if head.to_lowercase() == prefix {
                return Some(&text[prefix.len()..]);
            }
        }
    }
    None
}

fn is_handle(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_url(s: &str) -> bool {
    let lower = s.to_lowercase();
    (lower.starts_with("http://") && s.len() > 7) || (lower.starts_with("https://") && s.len() > 8)
}

/// Parses `CITY, RG` where `RG` is exactly two ASCII letters. Returns the
/// trimmed city and region.
fn parse_city_region(s: &str) -> Option<(String, String)> {
    let (city, region) = s.rsplit_once(',')?;
    let city = city.trim();
    let region = region.trim();
    if city.is_empty() {
        return None;
    }
    if region.len() != 2 || !region.chars().all(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    Some((city.to_string(), region.to_string()))
}

/// Attempts to parse `text` as a check-in announcement.
///
/// Returns `None` for anything that does not match the grammar — including
/// texts with an empty venue or a URL embedded in the venue position.
/// Whenever both the leading `@handle` and the trailing `- @handle` forms
/// appear, the leading one wins.
pub fn parse_checkin(text: &str) -> Option<CheckinFields> {
    let rest = strip_prefix_ci(text.trim_start())?;
    let mut rest = rest.trim();

    // Trailing URL: the final whitespace-delimited token, when it is one.
    let mut url = None;
    if let Some(last) = rest.rsplit(char::is_whitespace).next() {
        if is_url(last) {
            url = Some(last.to_string());
            rest = rest[..rest.len() - last.len()].trim_end();
        }
    }
    if rest.is_empty() {
        return None;
    }

    // Location: parenthesized `(CITY, RG)` at the end, or `in CITY, RG`
    // closing the text.
    let mut city = None;
    let mut region = None;
    let mut venue_part = rest;
    if rest.ends_with(')') {
        if let Some(open) = rest.rfind('(') {
            if let Some((c, r)) = parse_city_region(&rest[open + 1..rest.len() - 1]) {
                city = Some(c);
                region = Some(r);
                venue_part = rest[..open].trim_end();
            }
        }
    }
    if city.is_none() {
        for (idx, _) in rest.rmatch_indices(" in ") {
            if let Some((c, r)) = parse_city_region(&rest[idx + 4..]) {
                city = Some(c);
                region = Some(r);
                venue_part = rest[..idx].trim_end();
                break;
            }
        }
    }

    // Trailing `- @handle` after the venue.
    let mut handle = None;
    if let Some(idx) = venue_part.rfind(" - @") {
        let tail = &venue_part[idx + 4..];
        if is_handle(tail) {
            handle = Some(tail.to_string());
            venue_part = venue_part[..idx].trim_end();
        }
    }

    // Leading `@handle` before the venue; overrides a trailing handle.
    if let Some(after_at) = venue_part.strip_prefix('@') {
        let token = after_at.split_whitespace().next().unwrap_or("");
        // The handle must sit flush against the "@" ("@ name" is a venue).
        if is_handle(token) && after_at.starts_with(token) {
            handle = Some(token.to_string());
            venue_part = after_at[token.len()..].trim_start();
        }
    }

    let venue_name = venue_part.trim();
    if venue_name.is_empty() || venue_name.contains("http://") || venue_name.contains("https://") {
        return None;
    }

    Some(CheckinFields {
        venue_name: venue_name.to_string(),
        venue_handle: handle,
        city,
        region,
        url,
    })
}

/// Per-tract check-in tallies plus the count that landed outside all tracts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckinCounts {
    pub per_tract: BTreeMap<String, u64>,
    pub unlocalized: u64,
}

impl CheckinCounts {
    pub fn total(&self) -> u64 {
        self.per_tract.values().sum::<u64>() + self.unlocalized
    }
}

/// Tallies check-ins by tract given message → tract assignments.
///
/// Check-ins whose message has no assignment count as unlocalized; the
/// per-tract sums plus the unlocalized count always equal `checkins.len()`.
pub fn count_checkins_per_tract(
    checkins: &[CheckIn],
    assignments: &BTreeMap<String, String>,
) -> CheckinCounts {
    let mut counts = CheckinCounts::default();
    for checkin in checkins {
        match assignments.get(&checkin.message_id) {
            Some(tract_id) => *counts.per_tract.entry(tract_id.clone()).or_insert(0) += 1,
            None => counts.unlocalized += 1,
        }
    }
    counts
}
