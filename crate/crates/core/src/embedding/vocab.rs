use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub text: String,
    pub count: u64,
}

/// Unit vocabulary ordered by descending frequency, ties by text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    entries: Vec<VocabEntry>,
    index: BTreeMap<String, u32>,
}

impl Vocab {
    /// Counts words and keeps those seen at least `min_count` times.
    pub fn build<'a, I: IntoIterator<Item = &'a str>>(words: I, min_count: u64) -> Vocab {
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for w in words {
            *counts.entry(w).or_default() += 1;
        }
        let mut entries: Vec<VocabEntry> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .map(|(t, c)| VocabEntry { text: t.into(), count: c })
            .collect();
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.text.cmp(&b.text)));
        Vocab::from_entries(entries)
    }

    pub fn from_entries(entries: Vec<VocabEntry>) -> Vocab {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.text.clone(), i as u32))
            .collect();
        Vocab { entries, index }
    }

    pub fn id(&self, text: &str) -> Option<u32> {
        self.index.get(text).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn get(&self, id: u32) -> &VocabEntry {
        &self.entries[id as usize]
    }

    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_by_frequency_then_text() {
        let v = Vocab::build("Nm Ps Nm Ol Ps Nm A".split(' '), 1);
        let texts: Vec<_> = v.entries().iter().map(|e| e.text.as_str()).collect();
        assert_eq!(texts, ["Nm", "Ps", "A", "Ol"]);
        assert_eq!(v.id("Ps"), Some(1));
        assert_eq!(v.total_count(), 7);
    }

    #[test]
    fn min_count_filters() {
        let v = Vocab::build("Nm Ps Nm".split(' '), 2);
        assert_eq!(v.len(), 1);
        assert_eq!(v.id("Ps"), None);
    }
}
