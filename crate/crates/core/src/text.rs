//! Sentence segmentation, tokenization and the shipped stopword list.
//!
//! Tokens are lowercased and follow a light Penn-Treebank convention: clitics
//! are split off (`don't` → `do n't`, `i'm` → `i 'm`), punctuation marks are
//! separate tokens, URLs and known abbreviations (`e.g.`) stay whole.
//! Sentence boundaries always fall on whitespace, so tokenizing a body and
//! tokenizing its sentences one by one yield the same token count.

use std::collections::HashSet;
use std::ops::Range;
use std::sync::OnceLock;

const STOPWORDS: &str = include_str!("../resources/stopwords.txt");
const ABBREVIATIONS: &str = include_str!("../resources/abbreviations.txt");

/// The shipped English stopword list (NLTK-style plus Treebank clitics).
pub fn stopwords() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(|| parse_word_list(STOPWORDS))
}

fn abbreviations() -> &'static HashSet<String> {
    static SET: OnceLock<HashSet<String>> = OnceLock::new();
    SET.get_or_init(|| parse_word_list(ABBREVIATIONS))
}

/// One entry per line; blank lines and `#` comments are skipped.
pub fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// A token that carries lexical content: at least one letter and not a stopword.
pub fn is_content_token(token: &str, stopwords: &HashSet<String>) -> bool {
    token.chars().any(char::is_alphabetic) && !stopwords.contains(token)
}

/// Distinct content-word types of a token list, sorted.
pub fn content_types<'a>(tokens: &'a [String], stopwords: &HashSet<String>) -> Vec<&'a str> {
    let mut types: Vec<&str> = tokens
        .iter()
        .filter(|t| is_content_token(t, stopwords))
        .map(String::as_str)
        .collect();
    types.sort_unstable();
    types.dedup();
    types
}

/// Splits `text` into sentences, returning each trimmed sentence with its
/// byte span in `text`.
///
/// A boundary is placed at every line break, and after a run of `.`, `!` or
/// `?` (plus closing quotes/brackets) that is followed by whitespace and an
/// uppercase letter. A single period does not end a sentence after a known
/// abbreviation, a one-letter initial, or a leading list number such as `2.`.
pub fn segment_sentences(text: &str) -> Vec<(String, Range<usize>)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    let close = |from: usize, to: usize, out: &mut Vec<(String, Range<usize>)>| {
        let piece = &text[from..to];
        let lead = piece.len() - piece.trim_start().len();
        let trimmed = piece.trim();
        if !trimmed.is_empty() {
            let s = from + lead;
            out.push((trimmed.to_string(), s..s + trimmed.len()));
        }
    };

    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch == '\n' {
            close(start, pos, &mut out);
            start = pos + 1;
            i += 1;
            continue;
        }
        if matches!(ch, '.' | '!' | '?') {
            let mut j = i;
            while j < chars.len() && matches!(chars[j].1, '.' | '!' | '?') {
                j += 1;
            }
            let single_period = j == i + 1 && ch == '.';
            while j < chars.len() && is_closer(chars[j].1) {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |c| c.0);
            if j >= chars.len() {
                close(start, end, &mut out);
                start = end;
                i = j;
                continue;
            }
            if chars[j].1.is_whitespace() && next_starts_sentence(&chars, j) {
                let guarded = single_period && period_is_guarded(text, start, pos);
                if !guarded {
                    close(start, end, &mut out);
                    start = end;
                }
            }
            i = j;
            continue;
        }
        i += 1;
    }
    close(start, text.len(), &mut out);
    out
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201d}' | '\u{2019}' | ')' | ']' | '*')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201c}' | '\u{2018}' | '(' | '[' | '*')
}

/// After whitespace at `j`: does the next visible character open a sentence?
/// A line break also counts; the newline rule closes the sentence anyway.
fn next_starts_sentence(chars: &[(usize, char)], mut j: usize) -> bool {
    while j < chars.len() && chars[j].1.is_whitespace() {
        if chars[j].1 == '\n' {
            return true;
        }
        j += 1;
    }
    while j < chars.len() && is_opener(chars[j].1) {
        j += 1;
    }
    chars.get(j).is_some_and(|c| c.1.is_uppercase())
}

fn period_is_guarded(text: &str, sentence_start: usize, period: usize) -> bool {
    let before = &text[sentence_start..period];
    let word_start = before
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + before[p..].chars().next().map_or(1, char::len_utf8));
    let word = before[word_start..].trim_start_matches(is_opener);
    let candidate = format!("{}.", word.to_lowercase());
    if abbreviations().contains(&candidate) {
        return true;
    }
    // a middle initial such as "John F. Kennedy"
    let mut letters = word.chars();
    if let (Some(c), None) = (letters.next(), letters.next()) {
        let previous = before[..word_start].split_whitespace().next_back();
        if c.is_uppercase() && previous.is_some_and(|p| p.chars().next().is_some_and(char::is_uppercase)) {
            return true;
        }
    }
    // list bullets: the sentence so far is just a number
    let so_far = before.trim();
    !so_far.is_empty() && so_far.chars().all(|c| c.is_ascii_digit())
}

/// Lowercased tokens of `text`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let chunk = normalize_quotes(&chunk.to_lowercase());
        tokenize_chunk(&chunk, &mut out);
    }
    out
}

fn normalize_quotes(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\u{2018}' | '\u{2019}' => '\'',
            '\u{201c}' | '\u{201d}' => '"',
            other => other,
        })
        .collect()
}

const TRAILING: &[char] = &[',', ';', ':', '!', '?', ')', ']', '"', '\'', '*'];

fn tokenize_chunk(chunk: &str, out: &mut Vec<String>) {
    let mut rest = chunk;
    // leading punctuation
    while let Some(c) = rest.chars().next() {
        if c.is_alphanumeric() || is_url(rest) {
            break;
        }
        out.push(c.to_string());
        rest = &rest[c.len_utf8()..];
    }
    if rest.is_empty() {
        return;
    }

    let core = rest.trim_end_matches(TRAILING);
    let tail = &rest[core.len()..];
    if is_url(core) {
        let url = core.trim_end_matches(['.', ',']);
        out.push(url.to_string());
        out.extend(core[url.len()..].chars().map(String::from));
        out.extend(tail.chars().map(String::from));
        return;
    }
    if abbreviations().contains(core) {
        out.push(core.to_string());
        out.extend(tail.chars().map(String::from));
        return;
    }
    scan(rest, out);
}

fn is_url(s: &str) -> bool {
    s.starts_with("http://") || s.starts_with("https://") || s.starts_with("www.")
}

fn scan(s: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphanumeric() {
            let mut j = i + 1;
            while j < chars.len() {
                let d = chars[j];
                if d.is_alphanumeric() {
                    j += 1;
                } else if matches!(d, '\'' | '-')
                    && chars.get(j + 1).is_some_and(|n| n.is_alphanumeric())
                {
                    j += 2;
                } else if matches!(d, '.' | ',')
                    && chars[j - 1].is_ascii_digit()
                    && chars.get(j + 1).is_some_and(char::is_ascii_digit)
                {
                    j += 2;
                } else {
                    break;
                }
            }
            let word: String = chars[i..j].iter().collect();
            split_clitic(word, out);
            i = j;
        } else if c == '.' {
            let mut j = i;
            while j < chars.len() && chars[j] == '.' {
                j += 1;
            }
            out.push(chars[i..j].iter().collect());
            i = j;
        } else {
            out.push(c.to_string());
            i += 1;
        }
    }
}

fn clitic_suffix(after_apostrophe: &str) -> Option<&str> {
    ["s", "m", "re", "ve", "ll", "d"]
        .into_iter()
        .find(|suffix| after_apostrophe == *suffix)
}

fn split_clitic(word: String, out: &mut Vec<String>) {
    if word.len() > 3 && word.ends_with("n't") {
        out.push(word[..word.len() - 3].to_string());
        out.push("n't".to_string());
        return;
    }
    if let Some(pos) = word.rfind('\'') {
        if pos > 0 && clitic_suffix(&word[pos + 1..]).is_some() {
            out.push(word[..pos].to_string());
            out.push(word[pos..].to_string());
            return;
        }
    }
    out.push(word);
}

/// Lowercases and collapses whitespace runs to single spaces.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace()
        .map(|w| normalize_quotes(&w.to_lowercase()))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(text: &str) -> Vec<String> {
        segment_sentences(text).into_iter().map(|s| s.0).collect()
    }

    #[test]
    fn terminal_punctuation() {
        assert_eq!(texts("I agree. Why?"), vec!["I agree.", "Why?"]);
    }

    #[test]
    fn abbreviation_guard() {
        assert_eq!(texts("e.g. cats are great."), vec!["e.g. cats are great."]);
        assert_eq!(texts("See e.g. Cats are great."), vec!["See e.g. Cats are great."]);
        assert_eq!(texts("Ask Dr. Smith. He knows."), vec!["Ask Dr. Smith.", "He knows."]);
    }

    #[test]
    fn paragraph_break() {
        assert_eq!(texts("Line one\n\nLine two"), vec!["Line one", "Line two"]);
    }

    #[test]
    fn bullets_stay_attached() {
        assert_eq!(
            texts("1. First reason here.\n2. Second one."),
            vec!["1. First reason here.", "2. Second one."]
        );
    }

    #[test]
    fn lowercase_after_period_does_not_split() {
        assert_eq!(texts("It costs 3 dollars. or more"), vec!["It costs 3 dollars. or more"]);
    }

    #[test]
    fn quoted_sentence_start() {
        assert_eq!(
            texts("He left. \"Then what?\" she asked."),
            vec!["He left.", "\"Then what?\" she asked."]
        );
    }

    #[test]
    fn empty_text() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences("  \n\n ").is_empty());
    }

    #[test]
    fn spans_point_into_text() {
        let text = "  First one!  Second one?\nThird";
        for (s, span) in segment_sentences(text) {
            assert_eq!(&text[span], s);
        }
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Why?"), vec!["why", "?"]);
        assert_eq!(tokenize("50% of us"), vec!["50", "%", "of", "us"]);
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_clitics_and_bullets() {
        assert_eq!(tokenize("I don't know"), vec!["i", "do", "n't", "know"]);
        assert_eq!(tokenize("I can't, I'm tired"), vec!["i", "ca", "n't", ",", "i", "'m", "tired"]);
        assert_eq!(tokenize("2. Taxes"), vec!["2", ".", "taxes"]);
        assert_eq!(tokenize("(e.g. dogs)"), vec!["(", "e.g.", "dogs", ")"]);
        assert_eq!(tokenize("It’s self-evident."), vec!["it", "'s", "self-evident", "."]);
        assert_eq!(tokenize("costs 3.5 or 1,000."), vec!["costs", "3.5", "or", "1,000", "."]);
        assert_eq!(
            tokenize("see https://example.com/a.html."),
            vec!["see", "https://example.com/a.html", "."]
        );
        assert_eq!(tokenize("Wait..."), vec!["wait", "..."]);
    }

    proptest! {
        #[test]
        fn sentence_tokens_sum_to_body_tokens(text in "([A-Za-z]{1,6}[ ,.!?\n]{1,3}){0,25}") {
            let total: usize = segment_sentences(&text).iter().map(|(s, _)| tokenize(s).len()).sum();
            prop_assert_eq!(total, tokenize(&text).len());
        }

        #[test]
        fn spans_are_ordered_and_disjoint(text in "([A-Za-z]{1,6}[ .?\n]{1,3}){0,25}") {
            let sentences = segment_sentences(&text);
            for w in sentences.windows(2) {
                prop_assert!(w[0].1.end <= w[1].1.start);
            }
            for (s, span) in &sentences {
                prop_assert_eq!(&text[span.clone()], s.as_str());
                prop_assert!(text[span.clone()].trim() == s.as_str());
            }
        }
    }
}
