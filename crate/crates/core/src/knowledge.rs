//! Inverted index over argument-tree statements and the three knowledge
//! features derived from word-overlap retrieval.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::text::{content_types, stopwords, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    Pro,
    Con,
}

/// A node of an argument tree as stored in `kialo.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: String,
    pub text: String,
    /// Absent for the root statement.
    pub stance: Option<Stance>,
    pub children: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeStatement {
    pub id: String,
    pub text: String,
    /// Distinct content-word types.
    pub tokens: Vec<String>,
    pub pro_count: u32,
    pub con_count: u32,
}

impl KnowledgeStatement {
    pub fn responses(&self) -> u32 {
        self.pro_count + self.con_count
    }
}

fn node_from_value(v: &Value, path: &str) -> Result<TreeNode> {
    let err = |message: String| Error::KnowledgeTree { path: path.to_string(), message };
    let obj = v.as_object().ok_or_else(|| err("expected an object".into()))?;
    let id = match obj.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => return Err(err("missing `id`".into())),
    };
    let text = obj.get("text").and_then(Value::as_str).ok_or_else(|| err("missing `text`".into()))?.to_string();
    let stance = match obj.get("stance") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s == "pro" => Some(Stance::Pro),
        Some(Value::String(s)) if s == "con" => Some(Stance::Con),
        Some(other) => return Err(err(format!("stance must be \"pro\" or \"con\", got {other}"))),
    };
    let children = match obj.get("children") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, c)| node_from_value(c, &format!("{path}.children[{i}]")))
            .collect::<Result<_>>()?,
        Some(_) => return Err(err("`children` must be an array".into())),
    };
    Ok(TreeNode { id, text, stance, children })
}

/// Reads a JSON array of trees. Errors name the offending node path,
/// e.g. `trees[2].children[0]`.
pub fn read_trees<R: Read>(reader: R) -> Result<Vec<TreeNode>> {
    let value: Value = serde_json::from_reader(reader)?;
    let items = value
        .as_array()
        .ok_or_else(|| Error::KnowledgeTree { path: "trees".into(), message: "expected an array".into() })?;
    items.iter().enumerate().map(|(i, v)| node_from_value(v, &format!("trees[{i}]"))).collect()
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeIndex {
    pub statements: Vec<KnowledgeStatement>,
    postings: HashMap<String, Vec<u32>>,
}

impl KnowledgeIndex {
    pub fn build(trees: &[TreeNode]) -> Result<Self> {
        let stop = stopwords();
        let mut statements = Vec::new();
        let mut seen = HashSet::new();
        let mut stack: Vec<&TreeNode> = trees.iter().rev().collect();
        while let Some(node) = stack.pop() {
            if !seen.insert(node.id.as_str()) {
                return Err(Error::DuplicateId(node.id.clone()));
            }
            let tokens = tokenize(&node.text);
            let pro = node.children.iter().filter(|c| c.stance == Some(Stance::Pro)).count() as u32;
            let con = node.children.iter().filter(|c| c.stance == Some(Stance::Con)).count() as u32;
            statements.push(KnowledgeStatement {
                id: node.id.clone(),
                text: node.text.clone(),
                tokens: content_types(&tokens, stop).into_iter().map(str::to_string).collect(),
                pro_count: pro,
                con_count: con,
            });
            stack.extend(node.children.iter().rev());
        }
        let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
        for (i, s) in statements.iter().enumerate() {
            for t in &s.tokens {
                postings.entry(t.clone()).or_default().push(i as u32);
            }
        }
        Ok(KnowledgeIndex { statements, postings })
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Statements sharing at least `min_common` distinct content words
    /// with the sentence, in index order.
    pub fn retrieve(&self, tokens: &[String], min_common: usize) -> Vec<KnowledgeMatch> {
        let query = content_types(tokens, stopwords());
        if query.len() < min_common {
            return Vec::new();
        }
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for t in query {
            if let Some(ids) = self.postings.get(t) {
                for &id in ids {
                    *counts.entry(id).or_default() += 1;
                }
            }
        }
        counts
            .into_iter()
            .filter(|&(_, c)| c >= min_common)
            .map(|(id, shared)| KnowledgeMatch { statement: id as usize, shared })
            .collect()
    }

    pub fn features(&self, tokens: &[String], min_common: usize) -> KnowledgeFeatures {
        let matches = self.retrieve(tokens, min_common);
        let r: Vec<(u32, u32)> =
            matches.iter().map(|m| &self.statements[m.statement]).map(|s| (s.pro_count, s.con_count)).collect();
        KnowledgeFeatures::from_counts(&r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnowledgeMatch {
    pub statement: usize,
    pub shared: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeFeatures {
    pub n: usize,
    pub frequency: f64,
    pub attractiveness: f64,
    pub extremeness: f64,
}

impl KnowledgeFeatures {
    /// From the (pro, con) response counts of the matched statements.
    pub fn from_counts(matches: &[(u32, u32)]) -> Self {
        let n = matches.len();
        if n == 0 {
            return KnowledgeFeatures { n: 0, frequency: 0.0, attractiveness: 0.0, extremeness: 0.0 };
        }
        let mean_r = matches.iter().map(|&(p, c)| (p + c) as f64).sum::<f64>() / n as f64;
        let extremeness = matches
            .iter()
            .map(|&(p, c)| {
                let r = (p + c) as f64;
                if r == 0.0 {
                    0.0
                } else {
                    (p as f64 / r - c as f64 / r).abs()
                }
            })
            .sum::<f64>()
            / n as f64;
        KnowledgeFeatures {
            n,
            frequency: frequency_feature(n),
            attractiveness: (mean_r + 1.0).log2(),
            extremeness,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.frequency, self.attractiveness, self.extremeness]
    }
}

pub fn frequency_feature(n: usize) -> f64 {
    (n as f64 + 1.0).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn node(id: &str, text: &str, stance: Option<Stance>, children: Vec<TreeNode>) -> TreeNode {
        TreeNode { id: id.into(), text: text.into(), stance, children }
    }

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn pro_con_counts() {
        let t = node(
            "root",
            "Taxes fund schools",
            None,
            vec![
                node("a", "yes", Some(Stance::Pro), vec![]),
                node("b", "indeed", Some(Stance::Pro), vec![]),
                node("c", "no", Some(Stance::Con), vec![]),
            ],
        );
        let idx = KnowledgeIndex::build(&[t]).unwrap();
        assert_eq!(idx.statements[0].pro_count, 2);
        assert_eq!(idx.statements[0].con_count, 1);
        assert_eq!(idx.len(), 4);
    }

    #[test]
    fn empty_and_duplicates() {
        let idx = KnowledgeIndex::build(&[]).unwrap();
        assert_eq!(idx.features(&toks("alpha beta gamma delta epsilon"), 5).n, 0);
        let dup = vec![node("x", "a", None, vec![]), node("x", "b", None, vec![])];
        assert!(matches!(KnowledgeIndex::build(&dup), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn malformed_node_reports_path() {
        let json = r#"[{"id": "r", "text": "t", "children": [{"id": "c", "stance": "maybe", "text": "x"}]}]"#;
        let err = read_trees(json.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("trees[0].children[0]"), "{err}");
        let ok = r#"[{"id": 1, "text": "t", "stance": null, "children": [{"id": "c", "stance": "pro", "text": "x", "children": []}]}]"#;
        assert_eq!(read_trees(ok.as_bytes()).unwrap()[0].children.len(), 1);
    }

    #[test]
    fn five_shared_words_threshold() {
        let trees = vec![
            node("five", "apples bananas cherries dates elderberries grow", None, vec![]),
            node("four", "apples bananas cherries dates", None, vec![]),
        ];
        let idx = KnowledgeIndex::build(&trees).unwrap();
        let m = idx.retrieve(&toks("the apples and bananas and cherries and dates with elderberries"), 5);
        assert_eq!(m, vec![KnowledgeMatch { statement: 0, shared: 5 }]);
        assert!(idx.retrieve(&toks("apples bananas cherries"), 5).is_empty());
    }

    #[test]
    fn formula_values() {
        assert!((frequency_feature(18) - 19f64.log2()).abs() < 1e-9);
        assert_eq!(frequency_feature(0), 0.0);
        assert_eq!(frequency_feature(1), 1.0);
        let f = KnowledgeFeatures::from_counts(&[(3, 0), (2, 3)]);
        assert!((f.attractiveness - 5f64.log2()).abs() < 1e-9);
        assert_eq!(KnowledgeFeatures::from_counts(&[(0, 0)]).attractiveness, 0.0);
        assert_eq!(KnowledgeFeatures::from_counts(&[(4, 0), (1, 0)]).extremeness, 1.0);
        assert_eq!(KnowledgeFeatures::from_counts(&[(2, 2)]).extremeness, 0.0);
        assert_eq!(KnowledgeFeatures::from_counts(&[(2, 0), (1, 1)]).extremeness, 0.5);
        let zero = KnowledgeFeatures::from_counts(&[]);
        assert_eq!(zero.as_array(), [0.0; 3]);
    }

    proptest! {
        #[test]
        fn bounds(counts in proptest::collection::vec((0u32..20, 0u32..20), 0..10)) {
            let f = KnowledgeFeatures::from_counts(&counts);
            prop_assert!((0.0..=1.0).contains(&f.extremeness));
            prop_assert!(f.frequency >= 0.0 && f.attractiveness >= 0.0);
        }

        #[test]
        fn order_invariant(perm in Just(vec!["apples", "bananas", "cherries", "dates", "elderberries", "figs"]).prop_shuffle()) {
            let trees = vec![node("s", "figs apples bananas cherries dates elderberries", None, vec![])];
            let idx = KnowledgeIndex::build(&trees).unwrap();
            let q: Vec<String> = perm.iter().map(|s| s.to_string()).collect();
            prop_assert_eq!(idx.retrieve(&q, 5).len(), 1);
        }
    }
}
