//! Posts, comments and sentence records; JSONL ingestion and time-based splits.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::text::{segment_sentences, tokenize};

pub const CORPUS_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SuccessLabel {
    Successful,
    Unsuccessful,
    #[default]
    Unattacked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub post_id: String,
    pub index: usize,
    pub text: String,
    pub tokens: Vec<String>,
    /// Byte offsets into the post body.
    pub char_span: (usize, usize),
    #[serde(default)]
    pub attacked: bool,
    #[serde(default)]
    pub success: SuccessLabel,
}

impl SentenceRecord {
    /// Stable key used across artifacts: `post_id:index`.
    pub fn key(&self) -> String {
        sentence_key(&self.post_id, self.index)
    }
}

pub fn sentence_key(post_id: &str, index: usize) -> String {
    format!("{post_id}:{index}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub title: String,
    pub body: String,
    pub author: String,
    pub created_utc: i64,
    pub sentences: Vec<SentenceRecord>,
    pub domain: Option<usize>,
}

impl Post {
    pub fn new(id: &str, title: &str, body: &str, author: &str, created_utc: i64) -> Self {
        let sentences = segment_sentences(body)
            .into_iter()
            .enumerate()
            .map(|(index, (text, span))| SentenceRecord {
                post_id: id.to_string(),
                index,
                tokens: tokenize(&text),
                text,
                char_span: (span.start, span.end),
                attacked: false,
                success: SuccessLabel::Unattacked,
            })
            .collect();
        Post {
            id: id.to_string(),
            title: title.to_string(),
            body: body.to_string(),
            author: author.to_string(),
            created_utc,
            sentences,
            domain: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub post_id: String,
    /// Absent for top-level comments.
    #[serde(default)]
    pub parent_id: Option<String>,
    pub body: String,
    pub created_utc: i64,
    #[serde(default)]
    pub delta_awarded: bool,
}

impl Comment {
    pub fn is_top_level(&self) -> bool {
        self.parent_id.as_deref().is_none_or(|p| p == self.post_id)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub version: u32,
    /// Sorted by `(created_utc, id)`.
    pub posts: Vec<Post>,
    /// Sorted by `(post_id, created_utc, id)`.
    pub comments: Vec<Comment>,
}

impl Corpus {
    pub fn post(&self, id: &str) -> Option<&Post> {
        self.posts.iter().find(|p| p.id == id)
    }

    /// Comments grouped by post id, in stored order.
    pub fn comments_by_post(&self) -> HashMap<&str, Vec<&Comment>> {
        let mut map: HashMap<&str, Vec<&Comment>> = HashMap::new();
        for c in &self.comments {
            map.entry(c.post_id.as_str()).or_default().push(c);
        }
        map
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, self)?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let corpus: Corpus = serde_json::from_reader(reader)?;
        if corpus.version != CORPUS_FORMAT_VERSION {
            return Err(Error::Invalid(format!(
                "corpus format version {} (expected {CORPUS_FORMAT_VERSION})",
                corpus.version
            )));
        }
        Ok(corpus)
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<serde_json::Map<String, Value>> {
    match serde_json::from_str::<Value>(line) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Error::Record { line: line_no, message: "expected a JSON object".into() }),
        Err(e) => Err(Error::Record { line: line_no, message: format!("malformed JSON: {e}") }),
    }
}

fn required_str(map: &serde_json::Map<String, Value>, field: &str, line: usize) -> Result<String> {
    match map.get(field) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) => Ok(n.to_string()),
        Some(_) => Err(Error::Record { line, message: format!("field `{field}` must be a string") }),
        None => Err(Error::Record { line, message: format!("missing field `{field}`") }),
    }
}

fn optional_str(map: &serde_json::Map<String, Value>, field: &str) -> Option<String> {
    match map.get(field) {
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        _ => None,
    }
}

fn required_time(map: &serde_json::Map<String, Value>, field: &str, line: usize) -> Result<i64> {
    let value = map
        .get(field)
        .ok_or_else(|| Error::Record { line, message: format!("missing field `{field}`") })?;
    let t = match value {
        Value::Number(n) => n.as_i64().or_else(|| n.as_f64().map(|f| f as i64)),
        Value::String(s) => s.trim().parse::<i64>().ok(),
        _ => None,
    };
    match t {
        Some(t) if t > 0 => Ok(t),
        _ => Err(Error::Record {
            line,
            message: format!("field `{field}` must be a positive integer timestamp"),
        }),
    }
}

/// Reads posts from a JSONL stream (`id`, `body`, `created_utc` required;
/// `title`, `author` optional). The result is sorted by `(created_utc, id)`,
/// so input order does not matter.
pub fn ingest_posts<R: BufRead>(reader: R) -> Result<Vec<Post>> {
    let mut seen = HashSet::new();
    let mut posts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let map = parse_line(&line, line_no)?;
        let id = required_str(&map, "id", line_no)?;
        let body = required_str(&map, "body", line_no)?;
        let created_utc = required_time(&map, "created_utc", line_no)?;
        let title = optional_str(&map, "title").unwrap_or_default();
        let author = optional_str(&map, "author").unwrap_or_default();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        posts.push(Post::new(&id, &title, &body, &author, created_utc));
    }
    posts.sort_by(|a, b| (a.created_utc, &a.id).cmp(&(b.created_utc, &b.id)));
    Ok(posts)
}

/// Reads comments from a JSONL stream.
pub fn ingest_comments<R: BufRead>(reader: R) -> Result<Vec<Comment>> {
    let mut seen = HashSet::new();
    let mut comments = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let map = parse_line(&line, line_no)?;
        let id = required_str(&map, "id", line_no)?;
        let post_id = required_str(&map, "post_id", line_no)?;
        let body = required_str(&map, "body", line_no)?;
        let created_utc = required_time(&map, "created_utc", line_no)?;
        let parent_id = optional_str(&map, "parent_id").filter(|p| !p.is_empty());
        let delta_awarded = match map.get("delta_awarded") {
            None | Some(Value::Null) => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => {
                return Err(Error::Record {
                    line: line_no,
                    message: "field `delta_awarded` must be a boolean".into(),
                })
            }
        };
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        comments.push(Comment { id, post_id, parent_id, body, created_utc, delta_awarded });
    }
    Ok(comments)
}

/// Assembles a corpus, checking that every comment belongs to a known post
/// and that each parent chain is acyclic and ends at the post.
pub fn build_corpus(posts: Vec<Post>, mut comments: Vec<Comment>) -> Result<Corpus> {
    let post_ids: HashSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();
    let by_id: HashMap<&str, &Comment> = comments.iter().map(|c| (c.id.as_str(), c)).collect();
    for c in &comments {
        if !post_ids.contains(c.post_id.as_str()) {
            return Err(Error::Invalid(format!("comment `{}` refers to unknown post `{}`", c.id, c.post_id)));
        }
        let mut current = c;
        let mut steps = 0usize;
        while !current.is_top_level() {
            let parent = current.parent_id.as_deref().unwrap_or_default();
            current = by_id.get(parent).copied().ok_or_else(|| {
                Error::Invalid(format!("comment `{}` has unknown parent `{parent}`", c.id))
            })?;
            if current.post_id != c.post_id {
                return Err(Error::Invalid(format!("comment `{}` crosses posts via `{parent}`", c.id)));
            }
            steps += 1;
            if steps > by_id.len() {
                return Err(Error::Invalid(format!("comment `{}` has a cyclic parent chain", c.id)));
            }
        }
    }
    comments.sort_by(|a, b| (&a.post_id, a.created_utc, &a.id).cmp(&(&b.post_id, b.created_utc, &b.id)));
    Ok(Corpus { version: CORPUS_FORMAT_VERSION, posts, comments })
}

/// Split boundaries; a post belongs to the first split whose end it does not
/// exceed (`created_utc <= train_end_utc` is train).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub train_end_utc: i64,
    pub val_end_utc: i64,
    pub test_end_utc: i64,
}

impl SplitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train_end_utc < self.val_end_utc && self.val_end_utc < self.test_end_utc {
            Ok(())
        } else {
            Err(Error::Invalid("split boundaries must be strictly increasing".into()))
        }
    }

    pub fn assign(&self, created_utc: i64) -> Option<Split> {
        if created_utc <= self.train_end_utc {
            Some(Split::Train)
        } else if created_utc <= self.val_end_utc {
            Some(Split::Val)
        } else if created_utc <= self.test_end_utc {
            Some(Split::Test)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// Post ids per split. Posts newer than `test_end_utc` are listed in `dropped`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
    pub dropped: Vec<String>,
}

impl Splits {
    pub fn lookup(&self) -> BTreeMap<&str, Split> {
        let mut map = BTreeMap::new();
        for (split, ids) in [(Split::Train, &self.train), (Split::Val, &self.val), (Split::Test, &self.test)] {
            for id in ids {
                map.insert(id.as_str(), split);
            }
        }
        map
    }

    pub fn ids(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }
}

pub fn split_corpus(posts: &[Post], config: &SplitConfig) -> Result<Splits> {
    config.validate()?;
    let mut splits = Splits::default();
    for post in posts {
        let bucket = match config.assign(post.created_utc) {
            Some(Split::Train) => &mut splits.train,
            Some(Split::Val) => &mut splits.val,
            Some(Split::Test) => &mut splits.test,
            None => &mut splits.dropped,
        };
        bucket.push(post.id.clone());
    }
    if splits.train.is_empty() {
        return Err(Error::EmptySplit("train"));
    }
    Ok(splits)
}
