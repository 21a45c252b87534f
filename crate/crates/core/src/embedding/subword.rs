//! Character n-grams and the bucket hash used by fastText.

use alloc::string::String;
use alloc::vec::Vec;

pub const BOW: char = '<';
pub const EOW: char = '>';

/// 32-bit FNV-1a over bytes, each byte sign-extended first as the
/// reference implementation does.
pub fn fasttext_hash(s: &str) -> u32 {
    let mut h: u32 = 2_166_136_261;
    for &b in s.as_bytes() {
        h ^= (b as i8) as u32;
        h = h.wrapping_mul(16_777_619);
    }
    h
}

/// All character n-grams of `<text>` with lengths in `min..=max`.
///
/// Single-character n-grams touching a boundary marker are skipped.
pub fn ngrams(text: &str, min: usize, max: usize) -> Vec<String> {
    let mut word = String::with_capacity(text.len() + 2);
    word.push(BOW);
    word.push_str(text);
    word.push(EOW);
    let chars: Vec<char> = word.chars().collect();
    let mut out = Vec::new();
    for i in 0..chars.len() {
        let mut gram = String::new();
        for (n, j) in (i..chars.len()).enumerate().map(|(k, j)| (k + 1, j)) {
            if n > max {
                break;
            }
            gram.push(chars[j]);
            if n >= min && !(n == 1 && (i == 0 || j + 1 == chars.len())) {
                out.push(gram.clone());
            }
        }
    }
    out
}

/// Bucket indices in `[0, buckets)` of every n-gram of `text`.
pub fn ngram_buckets(text: &str, min: usize, max: usize, buckets: u64) -> Vec<u64> {
    ngrams(text, min, max)
        .iter()
        .map(|g| u64::from(fasttext_hash(g)) % buckets)
        .collect()
}
