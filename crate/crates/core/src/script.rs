//! Unicode-offset transliteration between the Brahmic script blocks.
//!
//! The nine major Brahmic blocks (Devanagari through Malayalam) are laid out
//! consecutively from U+0900 in 0x80-sized blocks with a shared internal
//! layout, so a character moves between scripts by swapping its block base.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Size of every Brahmic block handled here.
pub const BLOCK_LENGTH: u32 = 0x80;

const DEVANAGARI_START: u32 = 0x0900;

/// One of the nine Brahmic Unicode blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Script {
    Devanagari,
    Bengali,
    Gurmukhi,
    Gujarati,
    Oriya,
    Tamil,
    Telugu,
    Kannada,
    Malayalam,
}

impl Script {
    pub const ALL: [Script; 9] = [
        Script::Devanagari,
        Script::Bengali,
        Script::Gurmukhi,
        Script::Gujarati,
        Script::Oriya,
        Script::Tamil,
        Script::Telugu,
        Script::Kannada,
        Script::Malayalam,
    ];

    fn index(self) -> u32 {
        self as u32
    }

    /// First codepoint of the block.
    pub fn block_start(self) -> u32 {
        DEVANAGARI_START + self.index() * BLOCK_LENGTH
    }

    pub fn block_end(self) -> u32 {
        self.block_start() + BLOCK_LENGTH
    }

    pub fn contains(self, c: char) -> bool {
        (self.block_start()..self.block_end()).contains(&(c as u32))
    }

    /// The Brahmic block containing `c`, if any.
    pub fn of(c: char) -> Option<Script> {
        let cp = c as u32;
        let last = Script::Malayalam.block_end();
        if !(DEVANAGARI_START..last).contains(&cp) {
            return None;
        }
        Some(Script::ALL[((cp - DEVANAGARI_START) / BLOCK_LENGTH) as usize])
    }

    pub fn name(self) -> &'static str {
        match self {
            Script::Devanagari => "Devanagari",
            Script::Bengali => "Bengali",
            Script::Gurmukhi => "Gurmukhi",
            Script::Gujarati => "Gujarati",
            Script::Oriya => "Oriya",
            Script::Tamil => "Tamil",
            Script::Telugu => "Telugu",
            Script::Kannada => "Kannada",
            Script::Malayalam => "Malayalam",
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Script {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Script::ALL
            .iter()
            .copied()
            .find(|script| script.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| crate::Error::InvalidInput(format!("unknown script {s:?}")))
    }
}

/// Result of [`to_devanagari`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransliteratedText {
    pub text: String,
    /// Majority Brahmic script of the input, `None` if it had no Brahmic characters.
    pub source_script: Option<Script>,
    /// Characters outside every Brahmic block, copied unchanged.
    pub passthrough_count: usize,
}

/// Script holding the majority of the Brahmic characters in `text`.
///
/// Ties go to the block that comes first in Unicode order. Returns `None`
/// when no character falls in any Brahmic block.
pub fn detect_script(text: &str) -> Option<Script> {
    let mut counts = [0usize; 9];
    for c in text.chars() {
        if let Some(script) = Script::of(c) {
            counts[script as usize] += 1;
        }
    }
    let (best, &count) = counts
        .iter()
        .enumerate()
        .rev()
        .max_by_key(|(_, &n)| n)
        .expect("nine blocks");
    (count > 0).then(|| Script::ALL[best])
}

/// Map a single character into the Devanagari block by offset.
pub fn char_to_devanagari(c: char) -> Option<char> {
    let script = Script::of(c)?;
    let offset = c as u32 - script.block_start();
    char::from_u32(DEVANAGARI_START + offset)
}

/// Transliterate every Brahmic character in `text` into Devanagari.
///
/// Characters in any of the nine blocks move to U+0900 plus their offset
/// within their own block, whether or not the target slot is assigned.
/// Everything else is copied through.
pub fn to_devanagari(text: &str) -> TransliteratedText {
    let mut out = String::with_capacity(text.len());
    let mut passthrough_count = 0;
    for c in text.chars() {
        match char_to_devanagari(c) {
            Some(mapped) => out.push(mapped),
            None => {
                passthrough_count += 1;
                out.push(c);
            }
        }
    }
    TransliteratedText {
        text: out,
        source_script: detect_script(text),
        passthrough_count,
    }
}

/// Shorthand for `to_devanagari(text).text`.
pub fn standardize(text: &str) -> String {
    to_devanagari(text).text
}

/// Inverse offset map: move Devanagari characters into `target`'s block.
/// The dandas (U+0964, U+0965) are shared by all scripts and stay put.
pub fn from_devanagari(text: &str, target: Script) -> String {
    text.chars()
        .map(|c| {
            if Script::Devanagari.contains(c) && !matches!(c, '\u{0964}' | '\u{0965}') {
                char::from_u32(c as u32 - DEVANAGARI_START + target.block_start()).unwrap_or(c)
            } else {
                c
            }
        })
        .collect()
}
