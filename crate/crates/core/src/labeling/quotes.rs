//! Direct quotes (`>` lines) and their approximate alignment to post text.

use serde::{Deserialize, Serialize};

use crate::corpus::Post;
use crate::text::normalize_whitespace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuoteKind {
    Direct,
    Implicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quote {
    pub comment_id: String,
    pub text: String,
    pub kind: QuoteKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteMatch {
    pub quote: Quote,
    /// Contiguous, ascending post sentence indices.
    pub sentence_indices: Vec<usize>,
    pub edit_distance: usize,
    /// Fraction of quote characters covered by the aligned post text.
    pub coverage: f64,
}

/// Thresholds for accepting a direct-quote alignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchThresholds {
    pub edit_budget: usize,
    pub min_coverage: f64,
    pub min_span_chars: usize,
}

impl Default for MatchThresholds {
    fn default() -> Self {
        MatchThresholds { edit_budget: 2, min_coverage: 0.8, min_span_chars: 4 }
    }
}

fn quote_line_content(line: &str) -> Option<&str> {
    let trimmed = line.trim_start();
    let rest = if let Some(r) = trimmed.strip_prefix('>') {
        r
    } else {
        trimmed.strip_prefix("&gt;")?
    };
    // nested quote markers collapse into one level
    let mut rest = rest;
    loop {
        let t = rest.trim_start();
        if let Some(r) = t.strip_prefix('>') {
            rest = r;
        } else if let Some(r) = t.strip_prefix("&gt;") {
            rest = r;
        } else {
            return Some(t);
        }
    }
}

/// True when the line is part of a `>` quote block.
pub fn is_quote_line(line: &str) -> bool {
    quote_line_content(line).is_some()
}

/// Each maximal run of consecutive `>`-prefixed lines becomes one quote.
/// Both a literal `>` and the HTML-escaped `&gt;` found in raw dumps count.
pub fn extract_direct_quotes(comment_id: &str, body: &str) -> Vec<Quote> {
    let mut quotes = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let flush = |current: &mut Vec<&str>, quotes: &mut Vec<Quote>| {
        let text = current.join(" ");
        let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
        if !text.is_empty() {
            quotes.push(Quote { comment_id: comment_id.to_string(), text, kind: QuoteKind::Direct });
        }
        current.clear();
    };
    for line in body.lines() {
        match quote_line_content(line) {
            Some(content) => current.push(content),
            None => flush(&mut current, &mut quotes),
        }
    }
    flush(&mut current, &mut quotes);
    quotes
}

/// The body with quote lines removed.
pub fn strip_quote_lines(body: &str) -> String {
    body.lines().filter(|l| !is_quote_line(l)).collect::<Vec<_>>().join("\n")
}

/// Normalized post text with the sentence index of every character.
/// Separator spaces between sentences carry `None`.
pub(crate) struct AlignedPost {
    chars: Vec<char>,
    owner: Vec<Option<usize>>,
}

impl AlignedPost {
    pub(crate) fn new(post: &Post) -> Self {
        let mut chars = Vec::new();
        let mut owner = Vec::new();
        for s in &post.sentences {
            let norm = normalize_whitespace(&s.text);
            if norm.is_empty() {
                continue;
            }
            if !chars.is_empty() {
                chars.push(' ');
                owner.push(None);
            }
            for c in norm.chars() {
                chars.push(c);
                owner.push(Some(s.index));
            }
        }
        AlignedPost { chars, owner }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    len: u32,
    start: u32,
}

const NO_START: u32 = u32::MAX;

impl Cell {
    fn better(self, other: Cell) -> Cell {
        if self.start == NO_START || other.len > self.len || (other.len == self.len && other.start < self.start) {
            other
        } else {
            self
        }
    }
}

/// Result of the local alignment before thresholds are applied.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Alignment {
    pub covered: usize,
    pub edits: usize,
    pub text_start: usize,
    pub text_end: usize,
    pub sentences: Vec<usize>,
}

/// Finds the alignment of a quote substring to a post-text substring that
/// covers the most quote characters using at most `budget` edits. Among
/// alignments with maximal coverage the fewest edits win, then the widest
/// sentence span, then the earliest start.
///
/// Both ends are free on both sides: a quote may start or end mid-sentence,
/// and quoted external text around the post text is simply left uncovered.
pub(crate) fn align(quote: &[char], post: &AlignedPost, budget: usize) -> Option<Alignment> {
    let m = post.chars.len();
    if quote.is_empty() || m == 0 {
        return None;
    }
    let b = budget;
    let width = m + 1;
    // rows indexed [e * width + j]
    // alignments may only begin and end between words of the post text
    let boundary: Vec<bool> = (0..=m)
        .map(|j| j == 0 || j == m || !(post.chars[j - 1].is_alphanumeric() && post.chars[j].is_alphanumeric()))
        .collect();
    let fresh = |j: usize| Cell { len: 0, start: if boundary[j] { j as u32 } else { NO_START } };
    let mut prev: Vec<Cell> = (0..(b + 1) * width).map(|k| fresh(k % width)).collect();
    let mut cur = prev.clone();
    // best per edit level: (cell, end j)
    let mut best: Vec<Option<(Cell, usize, usize)>> = vec![None; b + 1];

    for &qc in quote.iter() {
        for e in 0..=b {
            let base = e * width;
            cur[base] = fresh(0);
            for j in 1..=m {
                let mut cell = fresh(j);
                let diag = prev[base + j - 1];
                if post.chars[j - 1] == qc && diag.start != NO_START {
                    cell = cell.better(Cell { len: diag.len + 1, start: diag.start });
                }
                if e > 0 {
                    let lower = (e - 1) * width;
                    for (from, gain) in [(prev[lower + j - 1], 1), (prev[lower + j], 1), (cur[lower + j - 1], 0)] {
                        if from.start != NO_START {
                            cell = cell.better(Cell { len: from.len + gain, start: from.start });
                        }
                    }
                }
                cur[base + j] = cell;
                if cell.len > 0 && boundary[j] && cell.start != NO_START {
                    let span = span_width(post, cell.start as usize, j);
                    let replace = match best[e] {
                        None => true,
                        Some((bc, bspan, _)) => {
                            cell.len > bc.len
                                || (cell.len == bc.len
                                    && (span > bspan || (span == bspan && cell.start < bc.start)))
                        }
                    };
                    if replace {
                        best[e] = Some((cell, span, j));
                    }
                }
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let top = best[b]?.0.len;
    let edits = (0..=b).find(|&e| best[e].is_some_and(|x| x.0.len == top))?;
    let (cell, _, end) = best[edits]?;
    let start = cell.start as usize;
    Some(Alignment {
        covered: cell.len as usize,
        edits,
        text_start: start,
        text_end: end,
        sentences: sentences_in(post, start, end),
    })
}

fn sentences_in(post: &AlignedPost, start: usize, end: usize) -> Vec<usize> {
    let first = post.owner[start..end].iter().flatten().next().copied();
    let last = post.owner[start..end].iter().rev().flatten().next().copied();
    match (first, last) {
        (Some(a), Some(b)) => (a..=b).collect(),
        _ => Vec::new(),
    }
}

fn span_width(post: &AlignedPost, start: usize, end: usize) -> usize {
    sentences_in(post, start, end).len()
}

/// Aligns a direct quote to the post and applies the acceptance rules:
/// edit distance within budget, matched text of at least one word and
/// `min_span_chars` characters, and coverage of at least `min_coverage`.
pub fn match_direct_quote(quote: &Quote, post: &Post, thresholds: &MatchThresholds) -> Option<QuoteMatch> {
    let aligned = AlignedPost::new(post);
    match_with(quote, &aligned, thresholds)
}

pub(crate) fn match_with(quote: &Quote, aligned: &AlignedPost, thresholds: &MatchThresholds) -> Option<QuoteMatch> {
    let qchars: Vec<char> = normalize_whitespace(&quote.text).chars().collect();
    let alignment = align(&qchars, aligned, thresholds.edit_budget)?;
    if alignment.sentences.is_empty() {
        return None;
    }
    let matched: String = aligned.chars[alignment.text_start..alignment.text_end].iter().collect();
    let matched = matched.trim();
    let has_word = matched.split_whitespace().any(|w| w.chars().any(char::is_alphanumeric));
    if !has_word || matched.chars().count() < thresholds.min_span_chars {
        return None;
    }
    let coverage = alignment.covered as f64 / qchars.len() as f64;
    if coverage < thresholds.min_coverage {
        return None;
    }
    Some(QuoteMatch {
        quote: quote.clone(),
        sentence_indices: alignment.sentences,
        edit_distance: alignment.edits,
        coverage,
    })
}
