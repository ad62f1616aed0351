//! List text normalization ahead of classification.
//!
//! Fixed application order: translate, emoji mapping, slang expansion,
//! lowercasing, whitespace collapse. Then exact-duplicate removal and the
//! under-two-words filter.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Classifier-ready text derived from one list's title and description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedText {
    pub source_list_id: String,
    pub text: String,
    pub word_count: usize,
}

#[derive(Debug, Error)]
pub enum TextPrepError {
    #[error("table line {line} is not surface<TAB>replacement")]
    MalformedTable { line: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
#[error("translation failed: {0}")]
pub struct TranslationError(pub String);

/// Pluggable translation hook. The default is identity so the whole pipeline
/// runs offline; a live adapter may call an external service.
pub trait Translate: Send + Sync {
    fn translate(&self, text: &str) -> Result<String, TranslationError>;
}

/// Offline default: passes text through unchanged.
#[derive(Debug, Default, Clone, Copy)]
pub struct IdentityTranslator;

impl Translate for IdentityTranslator {
    fn translate(&self, text: &str) -> Result<String, TranslationError> {
        Ok(text.to_string())
    }
}

/// Unicode ranges treated as emoji: anything here that is not in the shipped
/// table gets dropped rather than kept.
const EMOJI_RANGES: &[(u32, u32)] = &[
    (0x1F000, 0x1FAFF), // pictographs, emoticons, transport, supplemental
    (0x2600, 0x27BF),   // misc symbols and dingbats
    (0x2B00, 0x2BFF),   // misc symbols and arrows
    (0x2300, 0x23FF),   // technical (clocks, hourglasses)
];
const EMOJI_JOINERS: &[u32] = &[0xFE0E, 0xFE0F, 0x200D, 0x20E3];

pub fn is_emoji_char(c: char) -> bool {
    let cp = c as u32;
    EMOJI_RANGES.iter().any(|&(lo, hi)| (lo..=hi).contains(&cp)) || EMOJI_JOINERS.contains(&cp)
}

/// Surface-form to replacement-text table loaded from TSV.
#[derive(Debug, Clone)]
pub struct MappingTable {
    entries: HashMap<String, String>,
    max_surface_chars: usize,
}

impl MappingTable {
    pub fn parse(content: &str) -> Result<Self, TextPrepError> {
        let mut entries = HashMap::new();
        let mut max_surface_chars = 0;
        for (i, line) in content.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, replacement) = line
                .split_once('\t')
                .ok_or(TextPrepError::MalformedTable { line: i + 1 })?;
            if surface.is_empty() || replacement.is_empty() {
                return Err(TextPrepError::MalformedTable { line: i + 1 });
            }
            max_surface_chars = max_surface_chars.max(surface.chars().count());
            entries.insert(surface.to_string(), replacement.to_string());
        }
        Ok(MappingTable { entries, max_surface_chars })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, TextPrepError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn shipped_emoji() -> Self {
        Self::parse(include_str!("../data/emoji.tsv")).expect("shipped emoji table is well-formed")
    }

    pub fn shipped_slang() -> Self {
        Self::parse(include_str!("../data/slang.tsv")).expect("shipped slang table is well-formed")
    }

    pub fn get(&self, surface: &str) -> Option<&str> {
        self.entries.get(surface).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Map emoji to `:shortcode:` text via the table (longest surface first) and
/// drop emoji characters the table does not know.
fn map_emoji(text: &str, table: &MappingTable) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let mut matched = false;
        let longest = table.max_surface_chars.min(chars.len() - i);
        for len in (1..=longest).rev() {
            let candidate: String = chars[i..i + len].iter().collect();
            if let Some(replacement) = table.get(&candidate) {
                out.push(' ');
                out.push_str(replacement);
                out.push(' ');
                i += len;
                matched = true;
                break;
            }
        }
        if !matched {
            if is_emoji_char(chars[i]) {
                out.push(' ');
            } else {
                out.push(chars[i]);
            }
            i += 1;
        }
    }
    out
}

/// Replace whole whitespace-separated words found in the slang table.
fn expand_slang(text: &str, table: &MappingTable) -> String {
    text.split_whitespace()
        .map(|word| table.get(&word.to_lowercase()).unwrap_or(word))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The normalization pipeline with its tables and translation hook.
pub struct Normalizer<'a> {
    emoji: &'a MappingTable,
    slang: &'a MappingTable,
    translator: &'a dyn Translate,
    translation_failures: AtomicU64,
}

impl<'a> Normalizer<'a> {
    pub fn new(
        emoji: &'a MappingTable,
        slang: &'a MappingTable,
        translator: &'a dyn Translate,
    ) -> Self {
        Normalizer { emoji, slang, translator, translation_failures: AtomicU64::new(0) }
    }

    /// How many records fell back to identity because translation failed.
    pub fn translation_failures(&self) -> u64 {
        self.translation_failures.load(Ordering::Relaxed)
    }

    /// Normalize a list's title and description into classifier-ready text.
    ///
    /// A translator failure falls back to the untranslated text and bumps the
    /// failure counter; it never aborts the run.
    pub fn normalize(&self, list_id: &str, title: &str, description: &str) -> NormalizedText {
        let joined = format!("{title} {description}");
        let translated = match self.translator.translate(&joined) {
            Ok(text) => text,
            Err(err) => {
                self.translation_failures.fetch_add(1, Ordering::Relaxed);
                log::warn!("translation fell back to identity for list {list_id}: {err}");
                joined
            }
        };
        let mapped = map_emoji(&translated, self.emoji);
        let expanded = expand_slang(&mapped, self.slang);
        let lowered = expanded.to_lowercase();
        let text = lowered.split_whitespace().collect::<Vec<_>>().join(" ");
        let word_count = text.split_whitespace().count();
        NormalizedText { source_list_id: list_id.to_string(), text, word_count }
    }
}

/// Drop exact-duplicate texts (first occurrence wins, keyed on the normalized
/// text) and records with fewer than two words; otherwise keep input order.
pub fn dedup_and_filter(records: Vec<NormalizedText>) -> Vec<NormalizedText> {
    let mut seen = std::collections::HashSet::new();
    records
        .into_iter()
        .filter(|r| r.word_count >= 2 && seen.insert(r.text.clone()))
        .collect()
}
