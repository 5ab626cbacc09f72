//! Per-sentence attributions and static XHTML reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::SuccessLabel;
use crate::error::{Error, Result};
use crate::ranker::Scorer;
use crate::stats::html_escape;

/// Shade for the lowest score in a post.
pub const LOW_COLOR: [u8; 3] = [0xff, 0x45, 0x00];
/// Shade for the highest score in a post.
pub const HIGH_COLOR: [u8; 3] = [0x41, 0x69, 0xe1];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRow {
    pub key: String,
    pub intercept: f64,
    /// Pre-sigmoid score.
    pub logit: f64,
    pub score: f64,
    /// Every nonzero `weight × value`, largest magnitude first.
    pub contributions: Vec<(String, f64)>,
    pub attacked: bool,
    pub successful: bool,
}

impl AttributionRow {
    pub fn top_positive(&self, n: usize) -> Vec<&(String, f64)> {
        self.contributions.iter().filter(|c| c.1 > 0.0).take(n).collect()
    }

    pub fn top_negative(&self, n: usize) -> Vec<&(String, f64)> {
        self.contributions.iter().filter(|c| c.1 < 0.0).take(n).collect()
    }
}

/// Exact linear decomposition of one encoded row. Only the logistic model
/// is decomposable.
pub fn attribute(
    scorer: &Scorer,
    key: &str,
    row: &[(u32, f64)],
    attacked: bool,
    success: SuccessLabel,
) -> Result<AttributionRow> {
    let Scorer::Logistic(model) = scorer else {
        return Err(Error::Unsupported(format!("attribution for the {} scorer", scorer.name())));
    };
    let mut contributions = Vec::new();
    for &(c, v) in row {
        let (name, w) = model
            .weights
            .get_index(c as usize)
            .ok_or(Error::DimensionMismatch { expected: model.n_columns(), got: c as usize + 1 })?;
        let contribution = w * v;
        if contribution != 0.0 {
            contributions.push((name.clone(), contribution));
        }
    }
    // Sum in column order before sorting so the logit matches the scorer.
    let logit = model.intercept + contributions.iter().map(|c| c.1).sum::<f64>();
    contributions.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
    Ok(AttributionRow {
        key: key.to_string(),
        intercept: model.intercept,
        logit,
        score: 1.0 / (1.0 + (-logit).exp()),
        contributions,
        attacked,
        successful: success == SuccessLabel::Successful,
    })
}

/// Linear interpolation from `LOW_COLOR` (t = 0) to `HIGH_COLOR` (t = 1).
pub fn shade(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let c: Vec<u8> = LOW_COLOR
        .iter()
        .zip(HIGH_COLOR)
        .map(|(&lo, hi)| (lo as f64 + (hi as f64 - lo as f64) * t).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Min-max normalized scores; a post whose scores are all equal sits at 0.5.
pub fn normalize(scores: &[f64]) -> Vec<f64> {
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        scores.iter().map(|s| (s - lo) / (hi - lo)).collect()
    } else {
        vec![0.5; scores.len()]
    }
}

/// What the renderer needs to know about one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceView<'a> {
    pub text: &'a str,
    pub score: f64,
    pub attacked: bool,
    pub successful: bool,
    pub attribution: Option<&'a AttributionRow>,
}

const STYLE: &str = "body{font-family:sans-serif;max-width:60em;margin:2em auto;line-height:1.6}\
.s{padding:0.1em 0.2em;color:#fff}\
.ok{text-decoration:underline;text-decoration-thickness:2px}\
.legend span{padding:0 0.5em;color:#fff}\
ul.f{font-size:0.8em;margin:0 0 0.6em 1em;color:#333}\
table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:0.2em 0.5em;text-align:right}";

fn head(title: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\" lang=\"en\">\n<head>\
         <meta charset=\"utf-8\"/><title>{}</title><style>{STYLE}</style></head>\n<body>\n",
        html_escape(title)
    )
}

/// Self-contained XHTML page shading each sentence by its normalized
/// score, underlining successfully attacked sentences and listing the
/// top three positive and negative contributions.
pub fn render_post_html(post_id: &str, title: &str, sentences: &[SentenceView]) -> String {
    let scores: Vec<f64> = sentences.iter().map(|s| s.score).collect();
    let norm = normalize(&scores);
    let mut out = head(title);
    let _ = writeln!(out, "<h1>{}</h1>", html_escape(title));
    let _ = writeln!(
        out,
        "<p class=\"legend\">Predicted attackability: <span style=\"background:{}\">low</span> \
         <span style=\"background:{}\">high</span>; underlined sentences were successfully attacked.</p>",
        shade(0.0),
        shade(1.0)
    );
    let _ = writeln!(out, "<div class=\"post\" id=\"{}\">", html_escape(post_id));
    for (i, (s, t)) in sentences.iter().zip(&norm).enumerate() {
        let class = if s.successful { "s ok" } else { "s" };
        let _ = write!(
            out,
            "<p><span class=\"{class}\" id=\"s{i}\" style=\"background:{}\" title=\"score {:.4}{}\">{}</span></p>\n",
            shade(*t),
            s.score,
            if s.attacked { ", attacked" } else { "" },
            html_escape(s.text)
        );
        if let Some(a) = s.attribution {
            let items: Vec<String> = a
                .top_positive(3)
                .into_iter()
                .chain(a.top_negative(3))
                .map(|(name, c)| format!("<li>{} {:+.3}</li>", html_escape(name), c))
                .collect();
            if !items.is_empty() {
                let _ = writeln!(out, "<ul class=\"f\">{}</ul>", items.concat());
            }
        }
    }
    out.push_str("</div>\n</body>\n</html>\n");
    out
}

/// Index page linking every post report, with optional metrics text and
/// an embedded effects table.
pub fn render_index_html(posts: &[(String, String)], metrics: Option<&str>, effects_table: Option<&str>) -> String {
    let mut out = head("Attackability report");
    out.push_str("<h1>Attackability report</h1>\n");
    if let Some(m) = metrics {
        let _ = writeln!(out, "<h2>Ranking accuracy</h2>\n<pre>{}</pre>", html_escape(m));
    }
    if let Some(t) = effects_table {
        let _ = writeln!(out, "<h2>Feature effects (odds ratios)</h2>\n{t}");
    }
    out.push_str("<h2>Posts</h2>\n<ul>\n");
    for (file, title) in posts {
        let _ = writeln!(out, "<li><a href=\"{}\">{}</a></li>", html_escape(file), html_escape(title));
    }
    out.push_str("</ul>\n</body>\n</html>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;
    use crate::linalg::CsrMatrix;
    use crate::ranker::{Encoder, Norm, RankerModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn parse(html: &str) -> roxmltree::Document<'_> {
        let opts = roxmltree::ParsingOptions { allow_dtd: true, ..Default::default() };
        roxmltree::Document::parse_with_options(html, opts).unwrap()
    }

    fn model() -> RankerModel {
        let fv = |i: usize| FeatureVector {
            key: format!("p:{i}"),
            post_id: "p".into(),
            index: i,
            n_chars: 5,
            propositions: std::array::from_fn(|k| (i + k) % 3 == 0),
            tone: std::array::from_fn(|k| ((i * (k + 1)) % 7) as f64),
            knowledge: [i as f64 % 4.0, 0.0, 0.0],
            topic: Some(i % 2),
            domain: Some(i % 3),
            attacked: i % 2 == 0,
            success: SuccessLabel::Unattacked,
        };
        let train: Vec<FeatureVector> = (0..40).map(fv).collect();
        let enc = Encoder::fit(&train, 2, vec!["w".into()]).unwrap();
        let refs: Vec<&FeatureVector> = train.iter().collect();
        let ng: Vec<&[(u32, f64)]> = (0..40).map(|_| &[][..]).collect();
        let x = enc.design(&refs, &ng).unwrap();
        let y: Vec<bool> = train.iter().map(|f| f.attacked || f.index % 5 == 0).collect();
        RankerModel::train(enc, &x, &y, Norm::L2, 1e-2, 0, "attacked").unwrap()
    }

    #[test]
    fn recomposition() {
        let m = model();
        let p = m.n_columns();
        let scorer = Scorer::Logistic(Box::new(m.clone()));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let mut row = Vec::new();
            for c in 0..p as u32 {
                if rng.random::<f64>() < 0.3 {
                    row.push((c, rng.random::<f64>() * 4.0 - 2.0));
                }
            }
            let a = attribute(&scorer, "k", &row, false, SuccessLabel::Unattacked).unwrap();
            let direct = m.linear_scores(&CsrMatrix::from_rows(p, &[row])).unwrap()[0];
            let recomposed = a.intercept + a.contributions.iter().map(|c| c.1).sum::<f64>();
            assert!((recomposed - direct).abs() < 1e-9);
            assert!(a.contributions.windows(2).all(|w| w[0].1.abs() >= w[1].1.abs()));
        }
        let empty = attribute(&scorer, "k", &[], false, SuccessLabel::Unattacked).unwrap();
        assert!(empty.contributions.is_empty());
        let (j, _) = m.weights.values().enumerate().find(|(_, &w)| w != 0.0).unwrap();
        let one = attribute(&scorer, "k", &[(j as u32, 1.5)], false, SuccessLabel::Unattacked).unwrap();
        assert_eq!(one.contributions.len(), 1);
        assert!((one.contributions[0].1 - (one.logit - one.intercept)).abs() < 1e-12);
    }

    #[test]
    fn baselines_not_decomposable() {
        assert!(matches!(attribute(&Scorer::Length, "k", &[], false, SuccessLabel::Unattacked), Err(Error::Unsupported(_))));
    }

    fn views<'a>(scores: &[f64], texts: &'a [&'a str], successful: &[bool]) -> Vec<SentenceView<'a>> {
        scores
            .iter()
            .zip(texts)
            .zip(successful)
            .map(|((&score, &text), &ok)| SentenceView { text, score, attacked: ok, successful: ok, attribution: None })
            .collect()
    }

    #[test]
    fn shading_endpoints() {
        assert_eq!(shade(0.0), "#ff4500");
        assert_eq!(shade(1.0), "#4169e1");
        let texts = ["One & two.", "Three <b>.", "Four."];
        let html = render_post_html("p", "T", &views(&[0.2, 0.9, 0.5], &texts, &[false, true, false]));
        let doc = parse(&html);
        let span = |id: &str| doc.descendants().find(|n| n.attribute("id") == Some(id)).unwrap();
        assert!(span("s1").attribute("style").unwrap().contains("#4169e1"));
        assert!(span("s0").attribute("style").unwrap().contains("#ff4500"));
        let underlined = doc.descendants().filter(|n| n.attribute("class") == Some("s ok")).count();
        assert_eq!(underlined, 1);
        let uniform = render_post_html("p", "T", &views(&[0.3, 0.3, 0.3], &texts, &[false; 3]));
        assert_eq!(uniform.matches(&format!("background:{}", shade(0.5))).count(), 3);
        assert_eq!(html, render_post_html("p", "T", &views(&[0.2, 0.9, 0.5], &texts, &[false, true, false])));
    }

    #[test]
    fn attribution_list_and_index() {
        let m = model();
        let scorer = Scorer::Logistic(Box::new(m.clone()));
        let row: Vec<(u32, f64)> = (0..m.n_columns() as u32).map(|c| (c, 1.0)).collect();
        let a = attribute(&scorer, "p:0", &row, true, SuccessLabel::Successful).unwrap();
        let mut v = views(&[a.score], &["A sentence."], &[true]);
        v[0].attribution = Some(&a);
        let html = render_post_html("p", "Title", &v);
        let doc = parse(&html);
        let items = doc.descendants().filter(|n| n.has_tag_name("li")).count();
        assert!((1..=6).contains(&items));
        let index = render_index_html(&[("p.html".into(), "Title".into())], Some("LR 1 < 2"), Some("<table><tr><td>x</td></tr></table>"));
        parse(&index);
    }
}
