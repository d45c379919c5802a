//! Script and keyword heuristics that pick a demonstration pool.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locale {
    En,
    De,
    Es,
    Ja,
    Zh,
}

impl Locale {
    pub const ALL: [Locale; 5] = [Locale::En, Locale::De, Locale::Es, Locale::Ja, Locale::Zh];

    pub fn code(self) -> &'static str {
        match self {
            Locale::En => "en",
            Locale::De => "de",
            Locale::Es => "es",
            Locale::Ja => "ja",
            Locale::Zh => "zh",
        }
    }

    /// Language of a corpus locale tag such as `de_DE` or `en_IN`.
    pub fn from_tag(tag: &str) -> Option<Locale> {
        let lang = tag.split(['_', '-']).next()?;
        Locale::ALL.into_iter().find(|l| l.code().eq_ignore_ascii_case(lang))
    }
}

impl fmt::Display for Locale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Locale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Locale::ALL.into_iter().find(|l| l.code() == s).ok_or_else(|| format!("unknown locale `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateFormat {
    MdySlash,
    YmdDash,
    DmyDashMon,
    DmySlash,
    Unknown,
}

impl DateFormat {
    pub const ALL: [DateFormat; 5] =
        [DateFormat::MdySlash, DateFormat::YmdDash, DateFormat::DmyDashMon, DateFormat::DmySlash, DateFormat::Unknown];

    pub fn code(self) -> &'static str {
        match self {
            DateFormat::MdySlash => "mdy_slash",
            DateFormat::YmdDash => "ymd_dash",
            DateFormat::DmyDashMon => "dmy_dash_mon",
            DateFormat::DmySlash => "dmy_slash",
            DateFormat::Unknown => "unknown",
        }
    }
}

impl fmt::Display for DateFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for DateFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DateFormat::ALL.into_iter().find(|d| d.code() == s).ok_or_else(|| format!("unknown date format `{s}`"))
    }
}

/// Swappable locale classifier.
pub trait LocaleClassifier: Send + Sync {
    fn classify(&self, surface: &str) -> Locale;
}

/// The default character-range and keyword heuristic, see [`classify_locale`].
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicClassifier;

impl LocaleClassifier for HeuristicClassifier {
    fn classify(&self, surface: &str) -> Locale {
        classify_locale(surface)
    }
}

const GERMAN_CHARS: &[char] = &['ä', 'ö', 'ü', 'ß', 'Ä', 'Ö', 'Ü'];
const GERMAN_SUBSTRINGS: &[&str] = &["straße", "Straße", "platz", "allee", "GmbH"];
/// Whole-word surnames; pool entries without umlauts need them.
const GERMAN_WORDS: &[&str] =
    &["Schmidt", "Becker", "Hoffmann", "Wagner", "Weber", "Neumann", "Fischer", "Bauer", "Zimmermann", "Klein"];
const SPANISH_CHARS: &[char] = &['á', 'é', 'í', 'ó', 'ú', 'ñ', 'Ñ', '¿', '¡'];
const SPANISH_WORDS: &[&str] = &["Calle", "Avenida", "Colonia", "Castillo", "Ortiz", "Morales", "Aguilar"];

fn is_kana(c: char) -> bool {
    matches!(c, '\u{3040}'..='\u{309F}' | '\u{30A0}'..='\u{30FF}')
}

fn is_han(c: char) -> bool {
    matches!(c, '\u{4E00}'..='\u{9FFF}')
}

fn has_word(surface: &str, words: &[&str]) -> bool {
    surface.split(|c: char| !c.is_alphanumeric()).any(|w| words.contains(&w))
}

/// Precedence: kana → ja; Han → zh; German umlauts or keywords → de;
/// Spanish accents or keywords → es; otherwise en. Kanji-only Japanese
/// therefore lands in zh.
pub fn classify_locale(surface: &str) -> Locale {
    if surface.chars().any(is_kana) {
        Locale::Ja
    } else if surface.chars().any(is_han) {
        Locale::Zh
    } else if surface.chars().any(|c| GERMAN_CHARS.contains(&c))
        || GERMAN_SUBSTRINGS.iter().any(|k| surface.contains(k))
        || has_word(surface, GERMAN_WORDS)
    {
        Locale::De
    } else if surface.chars().any(|c| SPANISH_CHARS.contains(&c)) || has_word(surface, SPANISH_WORDS) {
        Locale::Es
    } else {
        Locale::En
    }
}

static DASH_MON: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\d{1,2}-(?:Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec)-\d{4}$").unwrap());
static YMD_DASH: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d{4}-\d{1,2}-\d{1,2}$").unwrap());
static SLASH: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(\d{1,2})/\d{1,2}/\d{4}$").unwrap());

pub fn classify_date_format(surface: &str) -> DateFormat {
    let s = surface.trim();
    if DASH_MON.is_match(s) {
        DateFormat::DmyDashMon
    } else if YMD_DASH.is_match(s) {
        DateFormat::YmdDash
    } else if let Some(caps) = SLASH.captures(s) {
        let first: u32 = caps[1].parse().expect("digits");
        if first > 12 {
            DateFormat::DmySlash
        } else {
            DateFormat::MdySlash
        }
    } else {
        DateFormat::Unknown
    }
}
