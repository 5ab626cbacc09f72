//! Scored word and phrase lexicons matched against token streams.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    words: Vec<String>,
    /// Trailing `*` on the last word: prefix match.
    wildcard: bool,
    score: f64,
}

/// A lexicon of (possibly multi-word) entries with scores. Entries are
/// tokenized with the corpus tokenizer so "won't" matches "wo n't".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    pub name: String,
    entries: Vec<Entry>,
    by_first: HashMap<String, Vec<usize>>,
    wildcard_first: Vec<usize>,
}

/// One match: the token range consumed and the entry score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexMatch {
    pub start: usize,
    pub len: usize,
    pub score: f64,
}

impl Lexicon {
    pub fn new(name: &str, items: impl IntoIterator<Item = (String, f64)>) -> Self {
        let mut lex = Lexicon { name: name.to_string(), ..Default::default() };
        for (phrase, score) in items {
            let raw = phrase.trim().to_lowercase();
            let wildcard = raw.ends_with('*') && raw.len() > 1;
            let body = raw.trim_end_matches('*');
            let words = if wildcard { body.split_whitespace().map(str::to_string).collect() } else { tokenize(body) };
            if words.is_empty() {
                continue;
            }
            let idx = lex.entries.len();
            if wildcard && words.len() == 1 {
                lex.wildcard_first.push(idx);
            } else {
                lex.by_first.entry(words[0].clone()).or_default().push(idx);
            }
            lex.entries.push(Entry { words, wildcard, score });
        }
        // longest entries first
        for ids in lex.by_first.values_mut() {
            ids.sort_by(|&a, &b| lex.entries[b].words.len().cmp(&lex.entries[a].words.len()).then(a.cmp(&b)));
        }
        lex
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses `entry<TAB>score` lines; `#` starts a comment line.
    pub fn parse_tsv(name: &str, text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (entry, score) = line.rsplit_once('\t').ok_or_else(|| Error::Lexicon {
                name: name.to_string(),
                message: format!("line {}: expected entry<TAB>score", n + 1),
            })?;
            let score: f64 = score.trim().parse().map_err(|_| Error::Lexicon {
                name: name.to_string(),
                message: format!("line {}: bad score `{}`", n + 1, score.trim()),
            })?;
            if !score.is_finite() {
                return Err(Error::Lexicon { name: name.to_string(), message: format!("line {}: non-finite score", n + 1) });
            }
            items.push((entry.to_string(), score));
        }
        let lex = Lexicon::new(name, items);
        if lex.is_empty() {
            return Err(Error::Lexicon { name: name.to_string(), message: "no entries".into() });
        }
        Ok(lex)
    }

    pub fn load_tsv(name: &str, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Lexicon {
            name: name.to_string(),
            message: format!("{}: {e}", path.display()),
        })?;
        Lexicon::parse_tsv(name, &text)
    }

    /// Replaces every score by its z-score over the lexicon entries
    /// (population standard deviation).
    pub fn standardized(mut self) -> Self {
        let n = self.entries.len() as f64;
        if n == 0.0 {
            return self;
        }
        let mean = self.entries.iter().map(|e| e.score).sum::<f64>() / n;
        let sd = (self.entries.iter().map(|e| (e.score - mean).powi(2)).sum::<f64>() / n).sqrt();
        for e in &mut self.entries {
            e.score = if sd > 0.0 { (e.score - mean) / sd } else { 0.0 };
        }
        self
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.score)
    }

    fn entry_matches(&self, entry: &Entry, forms: &[Vec<String>], start: usize) -> bool {
        if start + entry.words.len() > forms.len() {
            return false;
        }
        let last = entry.words.len() - 1;
        entry.words.iter().enumerate().all(|(k, w)| {
            let token = &forms[start + k];
            if entry.wildcard && k == last {
                token[0].starts_with(w.as_str())
            } else {
                token.iter().any(|f| f == w)
            }
        })
    }

    /// Greedy left-to-right matching; at each position the longest entry
    /// wins and its tokens are consumed.
    pub fn find(&self, tokens: &[String]) -> Vec<LexMatch> {
        let forms: Vec<Vec<String>> = tokens.iter().map(|t| word_forms(t)).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let mut best: Option<&Entry> = None;
            let mut consider = |idx: usize| {
                let e = &self.entries[idx];
                if best.is_none_or(|b| e.words.len() > b.words.len()) && self.entry_matches(e, &forms, i) {
                    best = Some(e);
                }
            };
            for f in &forms[i] {
                if let Some(ids) = self.by_first.get(f) {
                    ids.iter().for_each(|&idx| consider(idx));
                }
            }
            self.wildcard_first.iter().for_each(|&idx| consider(idx));
            match best {
                Some(e) => {
                    out.push(LexMatch { start: i, len: e.words.len(), score: e.score });
                    i += e.words.len();
                }
                None => i += 1,
            }
        }
        out
    }

    pub fn contains_word(&self, token: &str) -> bool {
        word_forms(token).iter().any(|f| self.by_first.get(f).is_some_and(|ids| ids.iter().any(|&i| self.entries[i].words.len() == 1)))
    }
}

fn irregular(token: &str) -> Option<&'static str> {
    Some(match token {
        "is" | "am" | "are" | "was" | "were" | "been" | "being" | "'s" | "'m" | "'re" => "be",
        "does" | "did" | "done" | "doing" => "do",
        "has" | "had" | "having" | "'ve" => "have",
        "n't" => "not",
        "ca" => "can",
        "wo" | "'ll" => "will",
        "'d" => "would",
        "thought" => "think",
        "felt" => "feel",
        "said" => "say",
        "knew" | "known" => "know",
        "saw" | "seen" => "see",
        "meant" => "mean",
        "understood" => "understand",
        "spoke" | "spoken" => "speak",
        "misunderstood" => "misunderstand",
        "swore" | "sworn" => "swear",
        "bet" => "bet",
        _ => return None,
    })
}

/// The token plus plausible base forms: an irregular-form table and
/// suffix stripping that keeps stems of at least four characters.
pub fn word_forms(token: &str) -> Vec<String> {
    let mut forms = vec![token.to_string()];
    if let Some(base) = irregular(token) {
        forms.push(base.to_string());
    }
    let mut push = |f: String| {
        if f.chars().count() >= 4 && !forms.contains(&f) {
            forms.push(f);
        }
    };
    if !token.chars().all(char::is_alphabetic) {
        return forms;
    }
    if let Some(s) = token.strip_suffix("ies") {
        push(format!("{s}y"));
    }
    if let Some(s) = token.strip_suffix("ied") {
        push(format!("{s}y"));
    }
    for suffix in ["ing", "es", "ed", "s", "d"] {
        if let Some(s) = token.strip_suffix(suffix) {
            if !s.ends_with('s') || suffix != "s" {
                push(s.to_string());
            }
            if suffix == "ing" {
                push(format!("{s}e"));
            }
        }
    }
    forms
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    fn lex(items: &[(&str, f64)]) -> Lexicon {
        Lexicon::new("t", items.iter().map(|(p, s)| (p.to_string(), *s)))
    }

    #[test]
    fn longest_match_consumes_tokens() {
        let l = lex(&[("i think", 1.0), ("think", 5.0), ("i", 2.0)]);
        let m = l.find(&toks("I think so"));
        assert_eq!(m, vec![LexMatch { start: 0, len: 2, score: 1.0 }]);
    }

    #[test]
    fn lemma_tolerant_entries() {
        let l = lex(&[("it be possible", 1.0), ("i do not think", 1.0), ("seem", 1.0)]);
        assert_eq!(l.find(&toks("It's possible.")).len(), 1);
        assert_eq!(l.find(&toks("I don't think so")).len(), 1);
        assert_eq!(l.find(&toks("it seems fine")).len(), 1);
        assert_eq!(l.find(&toks("it seemed fine")).len(), 1);
    }

    #[test]
    fn contractions_in_entries() {
        let l = lex(&[("won't", 1.0)]);
        assert_eq!(l.find(&toks("It won't work")).len(), 1);
    }

    #[test]
    fn wildcard_prefix() {
        let l = lex(&[("abandon*", 1.0)]);
        assert_eq!(l.find(&toks("they abandoned it")).len(), 1);
        assert!(l.find(&toks("a band")).is_empty());
    }

    #[test]
    fn short_stems_not_stripped() {
        assert!(!word_forms("bed").contains(&"b".to_string()));
        assert!(!word_forms("was").contains(&"wa".to_string()));
        assert!(word_forms("tends").contains(&"tend".to_string()));
        assert!(word_forms("hoped").contains(&"hope".to_string()));
        assert!(word_forms("worries").contains(&"worry".to_string()));
    }

    #[test]
    fn standardized_mean_zero() {
        let l = lex(&[("a", 1.0), ("b", 2.5), ("c", 4.0), ("d", 10.0)]).standardized();
        let scores: Vec<f64> = l.scores().collect();
        let mean = scores.iter().sum::<f64>() / 4.0;
        let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tsv_errors() {
        assert!(Lexicon::parse_tsv("x", "word\t1\nbad line").is_err());
        assert!(Lexicon::parse_tsv("x", "word\tabc").is_err());
        assert!(Lexicon::parse_tsv("x", "# only comment\n").is_err());
        assert_eq!(Lexicon::parse_tsv("x", "# c\nword\t0.5\nkind of\t1").unwrap().len(), 2);
        assert!(Lexicon::load_tsv("x", Path::new("/nonexistent/lexicon.tsv")).is_err());
    }
}
