//! Seeded synthetic corpora with known structure, used by tests and the demo
//! pipeline.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Comment, SplitConfig};
use crate::error::Result;
use crate::knowledge::{Stance, TreeNode};

const VOCAB_SIZE: usize = 40;
const PREFIXES: [&str; 8] = ["ruby", "azure", "olive", "amber", "coral", "ivory", "slate", "umber"];

fn letters(mut i: usize) -> String {
    let mut out = String::new();
    loop {
        out.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            return out;
        }
    }
}

/// Word `i` of vocabulary `v`. Vocabularies never share a word.
pub fn vocabulary_word(v: usize, i: usize) -> String {
    format!("{}{}", PREFIXES[v % PREFIXES.len()], letters(i + VOCAB_SIZE * (v / PREFIXES.len())))
}

/// Documents of 5–8 sentences, each drawn entirely from one of `n_vocabs`
/// disjoint vocabularies. Returns the documents and their vocabulary ids.
pub fn disjoint_vocabulary_docs(n_docs: usize, n_vocabs: usize, seed: u64) -> (Vec<Vec<Vec<String>>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<Vec<String>> =
        (0..n_vocabs).map(|v| (0..VOCAB_SIZE).map(|i| vocabulary_word(v, i)).collect()).collect();
    let mut docs = Vec::with_capacity(n_docs);
    let mut labels = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let v = d % n_vocabs;
        let n_sent = rng.random_range(5..=8);
        let doc = (0..n_sent)
            .map(|_| {
                let len = rng.random_range(6..=10);
                (0..len).map(|_| words[v].choose(&mut rng).unwrap().clone()).collect()
            })
            .collect();
        docs.push(doc);
        labels.push(v);
    }
    (docs, labels)
}

pub fn two_vocabulary_docs(n_docs: usize, seed: u64) -> (Vec<Vec<Vec<String>>>, Vec<usize>) {
    disjoint_vocabulary_docs(n_docs, 2, seed)
}

/// Sentence templates of the discussion generator, each with a fixed
/// attack propensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentenceKind {
    Normative,
    WhyQuestion,
    Prediction,
    Claim,
    Hypothetical,
    Example,
    Fact,
    Story,
}

impl SentenceKind {
    pub const ALL: [SentenceKind; 8] = [
        SentenceKind::Normative,
        SentenceKind::WhyQuestion,
        SentenceKind::Prediction,
        SentenceKind::Claim,
        SentenceKind::Hypothetical,
        SentenceKind::Example,
        SentenceKind::Fact,
        SentenceKind::Story,
    ];

    /// Attack log-odds contribution. Claims get theirs from the matched
    /// argument-tree statement instead.
    pub fn attack_weight(self) -> f64 {
        match self {
            SentenceKind::Normative => 3.5,
            SentenceKind::WhyQuestion => 2.6,
            SentenceKind::Prediction => 1.4,
            SentenceKind::Claim => 0.0,
            SentenceKind::Hypothetical => 0.0,
            SentenceKind::Example => -2.2,
            SentenceKind::Fact => -2.6,
            SentenceKind::Story => -3.6,
        }
    }

    /// Probability of a trailing clause; attack-prone kinds run longer.
    fn extension_rate(self) -> f64 {
        if self.attack_weight() > 1.0 {
            0.6
        } else {
            0.25
        }
    }
}

const VERBS: [&str; 8] = ["ban", "tax", "regulate", "fund", "replace", "protect", "abolish", "subsidize"];
const ADJECTIVES: [(&str, f64, f64); 10] = [
    ("terrible", 1.0, -0.9),
    ("wonderful", 1.0, 0.9),
    ("harmful", 0.8, -0.7),
    ("useful", 0.6, 0.6),
    ("expensive", 0.4, -0.3),
    ("cheap", 0.4, 0.2),
    ("unfair", 0.9, -0.8),
    ("fair", 0.7, 0.5),
    ("common", 0.1, 0.0),
    ("rare", 0.1, 0.0),
];
const REBUTTALS: [&str; 6] = [
    "That overlooks considerable counterevidence.",
    "Consider the alternative reasoning here.",
    "Tradeoffs exist that this ignores.",
    "Honestly that reasoning seems incomplete.",
    "Plenty of studies suggest otherwise.",
    "This assumption deserves scrutiny.",
];
const CHATTER: [&str; 3] =
    ["Interesting perspective, thanks for posting.", "Following this thread.", "Good luck with this discussion."];
const STATEMENTS_PER_DOMAIN: usize = 12;
/// Claims matching statements with at least this many responses are
/// attack-prone.
const POPULAR_RESPONSES: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmvConfig {
    pub n_posts: usize,
    pub n_domains: usize,
    pub seed: u64,
    pub start_utc: i64,
}

impl Default for CmvConfig {
    fn default() -> Self {
        CmvConfig { n_posts: 1000, n_domains: 5, seed: 0, start_utc: 1_500_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceTruth {
    pub kind: SentenceKind,
    pub p_attack: f64,
    pub attacked: bool,
    pub successful: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPost {
    pub id: String,
    pub title: String,
    pub body: String,
    pub author: String,
    pub created_utc: i64,
    pub domain: usize,
    pub truth: Vec<SentenceTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmvCorpus {
    pub posts: Vec<SyntheticPost>,
    pub comments: Vec<Comment>,
    pub trees: Vec<TreeNode>,
    pub splits: SplitConfig,
    /// `(file name, entries)` for the tone lexicons the generator uses.
    pub lexicons: Vec<(&'static str, Vec<(String, f64)>)>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

struct Statement {
    words: Vec<String>,
    responses: u32,
}

fn domain_nouns(d: usize) -> Vec<String> {
    (0..VOCAB_SIZE).map(|i| vocabulary_word(d, i)).collect()
}

fn build_trees(n_domains: usize, rng: &mut ChaCha8Rng) -> (Vec<TreeNode>, Vec<Vec<Statement>>) {
    let mut trees = Vec::new();
    let mut statements = Vec::new();
    for d in 0..n_domains {
        let nouns = domain_nouns(d);
        let claim_words: Vec<String> = (0..STATEMENTS_PER_DOMAIN * 3 + 2).map(|i| format!("{}ism", nouns[i])).collect();
        let mut children = Vec::new();
        let mut domain_statements = Vec::new();
        for s in 0..STATEMENTS_PER_DOMAIN {
            // Neighbouring statements share at most two words, so a claim
            // matches exactly one of them.
            let words: Vec<String> = claim_words[s * 3..s * 3 + 5].to_vec();
            let responses = if s % 2 == 0 { rng.random_range(8..=14) } else { rng.random_range(0..=3) };
            let n_pro = rng.random_range(0..=responses);
            let replies = (0..responses)
                .map(|r| TreeNode {
                    id: format!("k{d}_{s}_{r}"),
                    text: if r < n_pro { "Agreed.".into() } else { "Disagree.".into() },
                    stance: Some(if r < n_pro { Stance::Pro } else { Stance::Con }),
                    children: Vec::new(),
                })
                .collect();
            children.push(TreeNode {
                id: format!("k{d}_{s}"),
                text: format!("The {} matters.", words.join(" ")),
                stance: Some(if s % 3 == 0 { Stance::Con } else { Stance::Pro }),
                children: replies,
            });
            domain_statements.push(Statement { words, responses });
        }
        trees.push(TreeNode { id: format!("k{d}"), text: format!("Debate about {}.", nouns[39]), stance: None, children });
        statements.push(domain_statements);
    }
    (trees, statements)
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [String]) -> &'a str {
    items.choose(rng).expect("non-empty")
}

fn make_sentence(kind: SentenceKind, nouns: &[String], statements: &[Statement], rng: &mut ChaCha8Rng) -> (String, f64) {
    let n = |rng: &mut ChaCha8Rng| pick(rng, nouns).to_string();
    let v = *VERBS.choose(rng).expect("verbs");
    let a = ADJECTIVES.choose(rng).expect("adjectives").0;
    let mut weight = kind.attack_weight();
    let base = match kind {
        SentenceKind::Normative => format!("We should {v} the {} {} before it gets {a}", n(rng), n(rng)),
        SentenceKind::WhyQuestion => format!("Why do so many people {v} the {} {}", n(rng), n(rng)),
        SentenceKind::Prediction => format!("The {} will {v} every {} within a decade", n(rng), n(rng)),
        SentenceKind::Claim => {
            let s = statements.choose(rng).expect("statements");
            weight = if s.responses >= POPULAR_RESPONSES { 2.4 } else { -2.0 };
            format!("Many argue that the {} matters", s.words.join(" "))
        }
        SentenceKind::Hypothetical => format!("If the {} fails, the {} would look {a}", n(rng), n(rng)),
        SentenceKind::Example => format!("For example, my neighbor owns a {a} {}", n(rng)),
        SentenceKind::Fact => format!("The {} is {a}", n(rng)),
        SentenceKind::Story => format!("I grew up near a {} and a {}", n(rng), n(rng)),
    };
    let mut text = base;
    if rng.random::<f64>() < kind.extension_rate() {
        text.push_str(&format!(", especially around the {} and the {}", n(rng), n(rng)));
    }
    text.push(if kind == SentenceKind::WhyQuestion { '?' } else { '.' });
    (text, weight)
}

/// Discussion threads whose attack labels follow known sentence-level
/// weights: each post sentence is attacked with probability
/// `sigmoid(-0.4 + w(kind))`; attacked sentences are quoted verbatim by
/// top-level comments, and successful ones are quoted by a comment that
/// receives a delta. Posts are one hour apart and split 6:2:2 by time.
pub fn generate_cmv(config: &CmvConfig) -> CmvCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_domains = config.n_domains.max(1);
    let (trees, statements) = build_trees(n_domains, &mut rng);
    let mut posts = Vec::with_capacity(config.n_posts);
    let mut comments = Vec::new();
    for p in 0..config.n_posts {
        let id = format!("t3_{p:05}");
        let domain = rng.random_range(0..n_domains);
        let nouns = domain_nouns(domain);
        let created_utc = config.start_utc + 3600 * p as i64;
        let n_sent = rng.random_range(5..=9);
        let mut sentences = Vec::with_capacity(n_sent);
        let mut truth = Vec::with_capacity(n_sent);
        for _ in 0..n_sent {
            // Repeated sentences would make quotes ambiguous.
            let (kind, text, weight) = loop {
                let kind = *SentenceKind::ALL.choose(&mut rng).expect("kinds");
                let (text, weight) = make_sentence(kind, &nouns, &statements[domain], &mut rng);
                if !sentences.contains(&text) {
                    break (kind, text, weight);
                }
            };
            let p_attack = sigmoid(-0.4 + weight);
            let attacked = rng.random::<f64>() < p_attack;
            let successful = attacked && rng.random::<f64>() < sigmoid(-1.5 + 0.4 * weight);
            sentences.push(text);
            truth.push(SentenceTruth { kind, p_attack, attacked, successful });
        }
        let mut k = 0;
        let mut comment = |body: String, parent: Option<String>, delta: bool, comments: &mut Vec<Comment>| {
            k += 1;
            let cid = format!("{id}_c{k}");
            comments.push(Comment {
                id: cid.clone(),
                post_id: id.clone(),
                parent_id: parent,
                body,
                created_utc: created_utc + 60 * k as i64,
                delta_awarded: delta,
            });
            cid
        };
        let mut plain: Vec<usize> = (0..n_sent).filter(|&i| truth[i].attacked && !truth[i].successful).collect();
        plain.shuffle(&mut rng);
        for group in plain.chunks(2) {
            let quotes: Vec<String> = group.iter().map(|&i| format!("> {}", sentences[i])).collect();
            let body = format!("{}\n\n{}", quotes.join("\n\n"), REBUTTALS.choose(&mut rng).expect("rebuttals"));
            let cid = comment(body, None, false, &mut comments);
            if rng.random::<f64>() < 0.3 {
                comment("Fair, but I still disagree.".into(), Some(cid), false, &mut comments);
            }
        }
        for i in (0..n_sent).filter(|&i| truth[i].successful) {
            let body = format!("> {}\n\n{}", sentences[i], REBUTTALS.choose(&mut rng).expect("rebuttals"));
            let cid = comment(body, None, true, &mut comments);
            comment("You changed my view on this.".into(), Some(cid), false, &mut comments);
        }
        if rng.random::<f64>() < 0.5 {
            comment(CHATTER.choose(&mut rng).expect("chatter").to_string(), None, false, &mut comments);
        }
        let title = format!("CMV: the {} should be {}", nouns[38], ADJECTIVES.choose(&mut rng).expect("adjectives").0);
        posts.push(SyntheticPost {
            id,
            title,
            body: sentences.join(" "),
            author: format!("op{}", p % 97),
            created_utc,
            domain,
            truth,
        });
    }
    let at = |frac: f64| config.start_utc + 3600 * ((config.n_posts as f64 * frac).ceil() as i64 - 1).max(0);
    let splits = SplitConfig { train_end_utc: at(0.6), val_end_utc: at(0.8), test_end_utc: at(1.0).max(at(0.8) + 1) };
    let mut concreteness: Vec<(String, f64)> =
        (0..n_domains).flat_map(domain_nouns).map(|w| (w, 4.0)).collect();
    concreteness.extend(VERBS.iter().map(|v| (v.to_string(), 2.5)));
    let lexicons = vec![
        ("subjectivity.tsv", ADJECTIVES.iter().map(|a| (a.0.to_string(), a.1)).collect()),
        ("polarity.tsv", ADJECTIVES.iter().map(|a| (a.0.to_string(), a.2)).collect()),
        ("concreteness.tsv", concreteness),
        ("arousal.tsv", ADJECTIVES.iter().map(|a| (a.0.to_string(), 3.0 + 3.0 * a.1)).collect()),
        ("dominance.tsv", VERBS.iter().enumerate().map(|(i, v)| (v.to_string(), 3.0 + i as f64 * 0.5)).collect()),
    ];
    CmvCorpus { posts, comments, trees, splits, lexicons }
}

impl CmvCorpus {
    /// Writes `posts.jsonl`, `comments.jsonl`, `kialo.json`, `truth.jsonl`
    /// and `lexicons/*.tsv` under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("lexicons"))?;
        let mut posts = BufWriter::new(File::create(dir.join("posts.jsonl"))?);
        let mut truth = BufWriter::new(File::create(dir.join("truth.jsonl"))?);
        for p in &self.posts {
            let record = serde_json::json!({
                "id": p.id, "title": p.title, "body": p.body, "author": p.author, "created_utc": p.created_utc,
            });
            writeln!(posts, "{record}")?;
            writeln!(truth, "{}", serde_json::to_string(p)?)?;
        }
        posts.flush()?;
        truth.flush()?;
        let mut comments = BufWriter::new(File::create(dir.join("comments.jsonl"))?);
        for c in &self.comments {
            writeln!(comments, "{}", serde_json::to_string(c)?)?;
        }
        comments.flush()?;
        serde_json::to_writer(BufWriter::new(File::create(dir.join("kialo.json"))?), &self.trees)?;
        for (name, entries) in &self.lexicons {
            let mut f = BufWriter::new(File::create(dir.join("lexicons").join(name))?);
            for (w, s) in entries {
                writeln!(f, "{w}\t{s}")?;
            }
            f.flush()?;
        }
        Ok(())
    }
}
