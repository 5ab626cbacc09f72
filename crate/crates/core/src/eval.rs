//! Ranking metrics over per-post sentence rankings and system comparison.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One post's sentences ordered by descending score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub post_id: String,
    /// Sentence indices, best first.
    pub order: Vec<usize>,
    /// Relevance by sentence index.
    pub relevant: Vec<bool>,
}

/// Sentence indices by descending score; equal scores keep index order.
pub fn rank_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

impl Ranking {
    pub fn from_scores(post_id: &str, scores: &[f64], relevant: &[bool]) -> Result<Self> {
        if scores.len() != relevant.len() {
            return Err(Error::DimensionMismatch { expected: relevant.len(), got: scores.len() });
        }
        Ok(Ranking { post_id: post_id.to_string(), order: rank_order(scores), relevant: relevant.to_vec() })
    }

    fn relevance_by_rank(&self) -> impl Iterator<Item = bool> + '_ {
        self.order.iter().map(|&i| self.relevant[i])
    }

    fn check(&self) -> Result<()> {
        if !self.relevant.iter().any(|&r| r) {
            return Err(Error::Invalid(format!("post `{}` has no positive sentence", self.post_id)));
        }
        Ok(())
    }
}

fn mean_over_posts(rankings: &[Ranking], f: impl Fn(&Ranking) -> f64) -> Result<f64> {
    if rankings.is_empty() {
        return Err(Error::Invalid("no posts to evaluate".into()));
    }
    for r in rankings {
        r.check()?;
    }
    Ok(100.0 * rankings.iter().map(f).sum::<f64>() / rankings.len() as f64)
}

pub fn precision_at_1(rankings: &[Ranking]) -> Result<f64> {
    mean_over_posts(rankings, |r| if r.relevance_by_rank().next() == Some(true) { 1.0 } else { 0.0 })
}

/// Posts with fewer than three sentences are judged on all of them.
pub fn any_at_3(rankings: &[Ranking]) -> Result<f64> {
    mean_over_posts(rankings, |r| if r.relevance_by_rank().take(3).any(|x| x) { 1.0 } else { 0.0 })
}

pub fn average_precision(ranking: &Ranking) -> f64 {
    let mut hits = 0.0;
    let mut sum = 0.0;
    for (k, rel) in ranking.relevance_by_rank().enumerate() {
        if rel {
            hits += 1.0;
            sum += hits / (k + 1) as f64;
        }
    }
    if hits == 0.0 {
        0.0
    } else {
        sum / hits
    }
}

pub fn mean_average_precision(rankings: &[Ranking]) -> Result<f64> {
    mean_over_posts(rankings, average_precision)
}

/// Pooled ROC AUC from the Mann–Whitney statistic with midranks for ties.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: scores.len() });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Invalid("AUC needs both classes in the pool".into()));
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && scores[idx[j + 1]] == scores[idx[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += idx[i..=j].iter().filter(|&&k| labels[k]).count() as f64 * midrank;
        i = j + 1;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(100.0 * u / (n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub system: String,
    pub seed: u64,
    pub p_at_1: f64,
    pub a_at_3: f64,
    pub map: f64,
    pub auc: f64,
    pub n_posts: usize,
    pub n_sentences: usize,
    /// Sorted ids of the evaluated posts.
    pub posts: Vec<String>,
}

/// Scores per post are pooled for AUC; `rankings` and `scores` must be
/// aligned post by post.
pub fn evaluate_system(system: &str, seed: u64, rankings: &[Ranking], scores: &[Vec<f64>]) -> Result<MetricReport> {
    if rankings.len() != scores.len() {
        return Err(Error::DimensionMismatch { expected: rankings.len(), got: scores.len() });
    }
    let pooled: Vec<f64> = scores.iter().flatten().copied().collect();
    let labels: Vec<bool> = rankings.iter().flat_map(|r| r.relevant.iter().copied()).collect();
    let mut posts: Vec<String> = rankings.iter().map(|r| r.post_id.clone()).collect();
    posts.sort();
    Ok(MetricReport {
        system: system.to_string(),
        seed,
        p_at_1: precision_at_1(rankings)?,
        a_at_3: any_at_3(rankings)?,
        map: mean_average_precision(rankings)?,
        auc: auc(&pooled, &labels)?,
        n_posts: rankings.len(),
        n_sentences: pooled.len(),
        posts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    /// Sample standard deviation; zero for a single run.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanSd { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub system: String,
    pub runs: usize,
    pub p_at_1: MeanSd,
    pub a_at_3: MeanSd,
    pub map: MeanSd,
    pub auc: MeanSd,
}

/// Groups reports by system name (first-seen order) and summarizes
/// repeated runs. Every report must cover the same posts.
pub fn compare_systems(reports: &[MetricReport]) -> Result<Vec<SystemSummary>> {
    if let Some(first) = reports.first() {
        if let Some(bad) = reports.iter().find(|r| r.posts != first.posts) {
            return Err(Error::Invalid(format!(
                "system `{}` was evaluated on different posts than `{}`",
                bad.system, first.system
            )));
        }
    }
    let mut names: Vec<&str> = Vec::new();
    for r in reports {
        if !names.contains(&r.system.as_str()) {
            names.push(&r.system);
        }
    }
    Ok(names
        .into_iter()
        .map(|name| {
            let runs: Vec<&MetricReport> = reports.iter().filter(|r| r.system == name).collect();
            let col = |f: fn(&MetricReport) -> f64| MeanSd::of(&runs.iter().map(|r| f(r)).collect::<Vec<_>>());
            SystemSummary {
                system: name.to_string(),
                runs: runs.len(),
                p_at_1: col(|r| r.p_at_1),
                a_at_3: col(|r| r.a_at_3),
                map: col(|r| r.map),
                auc: col(|r| r.auc),
            }
        })
        .collect())
}

pub fn metrics_csv(reports: &[MetricReport]) -> String {
    let mut out = String::from("system,seed,p_at_1,a_at_3,map,auc,n_posts,n_sentences\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.4},{:.4},{:.4},{},{}",
            r.system, r.seed, r.p_at_1, r.a_at_3, r.map, r.auc, r.n_posts, r.n_sentences
        );
    }
    out
}

/// Plain-text table, one row per system, columns P@1, A@3, MAP, AUC.
pub fn summary_table(task: &str, summaries: &[SystemSummary]) -> String {
    let cell = |m: MeanSd| format!("{:.1} ± {:.1}", m.mean, m.sd);
    let mut out = format!("{task}\n{:<10} {:>14} {:>14} {:>14} {:>14}\n", "system", "P@1", "A@3", "MAP", "AUC");
    for s in summaries {
        let _ = writeln!(
            out,
            "{:<10} {:>14} {:>14} {:>14} {:>14}",
            s.system,
            cell(s.p_at_1),
            cell(s.a_at_3),
            cell(s.map),
            cell(s.auc)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if labels[i] && !labels[j] {
                    den += 1.0;
                    num += if scores[i] > scores[j] {
                        1.0
                    } else if scores[i] == scores[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        100.0 * num / den
    }

    fn ranking(rel_by_rank: &[bool]) -> Ranking {
        let n = rel_by_rank.len();
        let scores: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
        Ranking::from_scores("p", &scores, rel_by_rank).unwrap()
    }

    #[test]
    fn precision_cases() {
        let r = Ranking::from_scores("a", &[0.9, 0.1, 0.5], &[true, false, false]).unwrap();
        assert_eq!(precision_at_1(std::slice::from_ref(&r)).unwrap(), 100.0);
        let miss = ranking(&[false, true]);
        assert_eq!(precision_at_1(&[r, miss]).unwrap(), 50.0);
        assert!(precision_at_1(&[ranking(&[false, false])]).is_err());
    }

    #[test]
    fn any_at_3_cases() {
        assert_eq!(any_at_3(&[ranking(&[false, false, true])]).unwrap(), 100.0);
        assert_eq!(any_at_3(&[ranking(&[false, false, false, true, false, false])]).unwrap(), 0.0);
        assert_eq!(any_at_3(&[ranking(&[false, true])]).unwrap(), 100.0);
    }

    #[test]
    fn map_cases() {
        assert!((mean_average_precision(&[ranking(&[true, false, true])]).unwrap() - 83.3333).abs() < 0.01);
        assert_eq!(mean_average_precision(&[ranking(&[true, true, false])]).unwrap(), 100.0);
        for k in 1..=5 {
            let mut rel = vec![false; 5];
            rel[k - 1] = true;
            assert!((mean_average_precision(&[ranking(&rel)]).unwrap() - 100.0 / k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn auc_cases() {
        let s = [0.8, 0.6, 0.4, 0.2];
        assert_eq!(auc(&s, &[true, true, false, false]).unwrap(), 100.0);
        assert_eq!(auc(&s, &[true, false, true, false]).unwrap(), 75.0);
        assert!(auc(&s, &[true; 4]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let scores: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let labels: Vec<bool> = (0..10_000).map(|i| i % 2 == 0).collect();
        assert!((auc(&scores, &labels).unwrap() - 50.0).abs() < 2.0);
    }

    #[test]
    fn ties_break_by_index() {
        assert_eq!(rank_order(&[1.0, 2.0, 2.0, 0.0]), vec![1, 2, 0, 3]);
        assert_eq!(rank_order(&[]), Vec::<usize>::new());
    }

    #[test]
    fn comparison() {
        let r = ranking(&[true, false, false]);
        let a = evaluate_system("a", 0, std::slice::from_ref(&r), &[vec![3.0, 2.0, 1.0]]).unwrap();
        let mut b = a.clone();
        b.system = "b".into();
        let table = compare_systems(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].auc, table[1].auc);
        b.posts = vec!["other".into()];
        assert!(compare_systems(&[a, b]).is_err());
    }

    proptest! {
        #[test]
        fn auc_matches_pairwise(pool in proptest::collection::vec((0u8..20, any::<bool>()), 2..200)) {
            let scores: Vec<f64> = pool.iter().map(|(s, _)| *s as f64).collect();
            let labels: Vec<bool> = pool.iter().map(|(_, l)| *l).collect();
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            prop_assert!((auc(&scores, &labels).unwrap() - pairwise_auc(&scores, &labels)).abs() < 1e-9);
        }

        #[test]
        fn monotone_invariance(pool in proptest::collection::vec((-5.0f64..5.0, any::<bool>()), 2..60)) {
            let scores: Vec<f64> = pool.iter().map(|(s, _)| *s).collect();
            let labels: Vec<bool> = pool.iter().map(|(_, l)| *l).collect();
            prop_assume!(labels.iter().any(|&l| l));
            let moved: Vec<f64> = scores.iter().map(|s| s.exp() * 3.0 + 1.0).collect();
            let a = Ranking::from_scores("p", &scores, &labels).unwrap();
            let b = Ranking::from_scores("p", &moved, &labels).unwrap();
            prop_assert_eq!(&a.order, &b.order);
            let pa = precision_at_1(std::slice::from_ref(&a)).unwrap();
            prop_assert!(pa <= any_at_3(std::slice::from_ref(&a)).unwrap());
            if labels.iter().any(|&l| !l) {
                prop_assert!((auc(&scores, &labels).unwrap() - auc(&moved, &labels).unwrap()).abs() < 1e-9);
            }
        }
    }
}
