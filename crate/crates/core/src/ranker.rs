//! Regularized logistic-regression sentence scorer, hyperparameter grid
//! and the length and random baselines.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{auc, rank_order};
use crate::features::{FeatureVector, PROPOSITION_NAMES, KNOWLEDGE_NAMES, TONE_NAMES};
use crate::linalg::CsrMatrix;

pub const MODEL_VERSION: u32 = 1;
pub const GRID_REG_WEIGHTS: [f64; 4] = [1e-4, 1e-3, 1e-2, 1e-1];

/// Position of the sentiment category inside the tone block.
const TONE_CATEGORY: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    L2,
    L1,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::L2 => "l2",
            Norm::L1 => "l1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScaling {
    pub column: String,
    pub mean: f64,
    pub sd: f64,
}

/// Maps a sentence's dense features and n-gram weights to one design row.
/// Continuous columns are standardized with training statistics; topic is
/// one-hot; domains use indicator columns for every level but the smallest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    pub n_topics: usize,
    pub domain_levels: Vec<usize>,
    pub scaling: Vec<ColumnScaling>,
    pub ngram_terms: Vec<String>,
}

fn continuous_names() -> Vec<String> {
    TONE_NAMES
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != TONE_CATEGORY)
        .map(|(_, n)| n.to_string())
        .chain(KNOWLEDGE_NAMES.iter().map(|n| format!("knowledge_{n}")))
        .collect()
}

fn continuous_values(fv: &FeatureVector) -> Vec<f64> {
    fv.tone
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != TONE_CATEGORY)
        .map(|(_, v)| *v)
        .chain(fv.knowledge.iter().copied())
        .collect()
}

impl Encoder {
    pub fn fit(train: &[FeatureVector], n_topics: usize, ngram_terms: Vec<String>) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptySplit("train"));
        }
        let names = continuous_names();
        let n = train.len() as f64;
        let rows: Vec<Vec<f64>> = train.iter().map(continuous_values).collect();
        let scaling = names
            .into_iter()
            .enumerate()
            .map(|(j, column)| {
                let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
                let sd = (rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
                ColumnScaling { column, mean, sd }
            })
            .collect();
        let mut domain_levels: Vec<usize> = train.iter().filter_map(|f| f.domain).collect();
        domain_levels.sort_unstable();
        domain_levels.dedup();
        Ok(Encoder { n_topics, domain_levels, scaling, ngram_terms })
    }

    pub fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = PROPOSITION_NAMES.iter().map(|s| s.to_string()).collect();
        c.extend(self.scaling.iter().map(|s| s.column.clone()));
        c.extend(["sentiment_negative", "sentiment_neutral", "sentiment_positive"].map(String::from));
        c.extend((0..self.n_topics).map(|k| format!("topic_{k}")));
        c.extend(self.domain_levels.iter().skip(1).map(|d| format!("domain_{d}")));
        c.extend(self.ngram_terms.iter().map(|t| format!("ngram:{t}")));
        c
    }

    pub fn n_columns(&self) -> usize {
        PROPOSITION_NAMES.len() + self.scaling.len() + 3 + self.n_topics + self.domain_levels.len().saturating_sub(1)
            + self.ngram_terms.len()
    }

    /// One sparse row, columns increasing. `ngrams` holds `(term id, weight)`.
    pub fn encode(&self, fv: &FeatureVector, ngrams: &[(u32, f64)]) -> Result<Vec<(u32, f64)>> {
        let mut row = Vec::new();
        let mut col = 0u32;
        for &p in &fv.propositions {
            if p {
                row.push((col, 1.0));
            }
            col += 1;
        }
        for (v, s) in continuous_values(fv).into_iter().zip(&self.scaling) {
            if !v.is_finite() {
                return Err(Error::NonFinite(s.column.clone()));
            }
            let z = if s.sd > 0.0 { (v - s.mean) / s.sd } else { 0.0 };
            row.push((col, z));
            col += 1;
        }
        let category = fv.tone[TONE_CATEGORY];
        if !category.is_finite() {
            return Err(Error::NonFinite("sentiment_category".into()));
        }
        let slot = if category < 0.0 {
            0
        } else if category > 0.0 {
            2
        } else {
            1
        };
        row.push((col + slot, 1.0));
        col += 3;
        if let Some(t) = fv.topic.filter(|&t| t < self.n_topics) {
            row.push((col + t as u32, 1.0));
        }
        col += self.n_topics as u32;
        if let Some(level) = fv.domain.and_then(|d| self.domain_levels.binary_search(&d).ok()) {
            if level > 0 {
                row.push((col + level as u32 - 1, 1.0));
            }
        }
        col += self.domain_levels.len().saturating_sub(1) as u32;
        for &(id, w) in ngrams {
            if (id as usize) >= self.ngram_terms.len() {
                return Err(Error::DimensionMismatch { expected: self.ngram_terms.len(), got: id as usize + 1 });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("ngram:{}", self.ngram_terms[id as usize])));
            }
            row.push((col + id, w));
        }
        Ok(row)
    }

    pub fn design(&self, rows: &[&FeatureVector], ngrams: &[&[(u32, f64)]]) -> Result<CsrMatrix> {
        if rows.len() != ngrams.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), got: ngrams.len() });
        }
        let encoded: Vec<Vec<(u32, f64)>> =
            rows.par_iter().zip(ngrams.par_iter()).map(|(fv, ng)| self.encode(fv, ng)).collect::<Result<_>>()?;
        Ok(CsrMatrix::from_rows(self.n_columns(), &encoded))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub max_iter: usize,
    /// Bound on the largest first-order optimality violation.
    pub tol: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { max_iter: 3000, tol: 1e-6 }
    }
}

/// Solution of `min mean NLL + λ R(w)` with an unpenalized intercept,
/// `R = ½‖w‖²` for L2 and `‖w‖₁` for L1.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedFit {
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting from zero weights.
    pub objective_trace: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn log1pexp(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else if x < -35.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

struct Problem<'a> {
    x: &'a CsrMatrix,
    y: Vec<f64>,
    lambda: f64,
    norm: Norm,
}

impl Problem<'_> {
    fn n(&self) -> f64 {
        self.x.n_rows() as f64
    }

    fn eta(&self, b: f64, w: &[f64]) -> Vec<f64> {
        self.x.matvec(w).into_iter().map(|e| e + b).collect()
    }

    fn loss_from_eta(&self, eta: &[f64]) -> f64 {
        eta.iter().zip(&self.y).map(|(&e, &y)| log1pexp(e) - y * e).sum::<f64>() / self.n()
    }

    fn penalty(&self, w: &[f64]) -> f64 {
        match self.norm {
            Norm::L2 => 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>(),
            Norm::L1 => self.lambda * w.iter().map(|v| v.abs()).sum::<f64>(),
        }
    }

    fn objective(&self, b: f64, w: &[f64]) -> f64 {
        self.loss_from_eta(&self.eta(b, w)) + self.penalty(w)
    }

    /// Gradient of the mean NLL: `(∂b, ∂w)`, plus the fitted probabilities.
    fn loss_gradient(&self, b: f64, w: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let mu: Vec<f64> = self.eta(b, w).into_iter().map(sigmoid).collect();
        let r: Vec<f64> = mu.iter().zip(&self.y).map(|(m, y)| (m - y) / self.n()).collect();
        (r.iter().sum(), self.x.tmatvec(&r), mu)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Truncated Newton: conjugate gradients on Hessian-vector products,
/// then Armijo backtracking so the objective never increases.
fn fit_l2(pb: &Problem, opts: &TrainOptions) -> RegularizedFit {
    let p = pb.x.n_cols();
    let (mut b, mut w) = (0.0, vec![0.0; p]);
    let mut f = pb.objective(b, &w);
    let mut trace = vec![f];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let (gb, mut gw, mu) = pb.loss_gradient(b, &w);
        for (g, wj) in gw.iter_mut().zip(&w) {
            *g += pb.lambda * wj;
        }
        let gnorm = gb.abs().max(gw.iter().fold(0.0f64, |m, g| m.max(g.abs())));
        if gnorm < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let weights: Vec<f64> = mu.iter().map(|m| m * (1.0 - m) / pb.n()).collect();
        let hv = |vb: f64, vw: &[f64]| -> (f64, Vec<f64>) {
            let u: Vec<f64> = pb.x.matvec(vw).iter().zip(&weights).map(|(e, s)| (e + vb) * s).collect();
            let mut hw = pb.x.tmatvec(&u);
            for (h, v) in hw.iter_mut().zip(vw) {
                *h += (pb.lambda + 1e-12) * v;
            }
            (u.iter().sum::<f64>() + 1e-12 * vb, hw)
        };
        // CG on H d = -g.
        let (mut db, mut dw) = (0.0, vec![0.0; p]);
        let (mut rb, mut rw) = (-gb, gw.iter().map(|g| -g).collect::<Vec<_>>());
        let (mut sb, mut sw) = (rb, rw.clone());
        let mut rr = rb * rb + dot(&rw, &rw);
        let g2 = rr.sqrt();
        let cg_tol = g2 * g2.sqrt().min(0.5);
        for _ in 0..250 {
            let (hb, hw) = hv(sb, &sw);
            let curv = sb * hb + dot(&sw, &hw);
            if curv <= 0.0 {
                break;
            }
            let alpha = rr / curv;
            db += alpha * sb;
            for (d, s) in dw.iter_mut().zip(&sw) {
                *d += alpha * s;
            }
            rb -= alpha * hb;
            for (r, h) in rw.iter_mut().zip(&hw) {
                *r -= alpha * h;
            }
            let rr_new = rb * rb + dot(&rw, &rw);
            if rr_new.sqrt() <= cg_tol {
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            sb = rb + beta * sb;
            for (s, r) in sw.iter_mut().zip(&rw) {
                *s = r + beta * *s;
            }
        }
        if db == 0.0 && dw.iter().all(|&d| d == 0.0) {
            db = -gb;
            dw = gw.iter().map(|g| -g).collect();
        }
        let slope = gb * db + dot(&gw, &dw);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let nb = b + t * db;
            let nw: Vec<f64> = w.iter().zip(&dw).map(|(a, d)| a + t * d).collect();
            let nf = pb.objective(nb, &nw);
            if nf <= f + 1e-4 * t * slope {
                b = nb;
                w = nw;
                f = nf;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        trace.push(f);
    }
    RegularizedFit { intercept: b, weights: w, iterations, converged, objective_trace: trace }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Largest violation of the L1 optimality conditions.
fn l1_violation(gb: f64, gw: &[f64], w: &[f64], lambda: f64) -> f64 {
    gw.iter().zip(w).fold(gb.abs(), |m, (&g, &wj)| {
        let v = if wj == 0.0 { (g.abs() - lambda).max(0.0) } else { (g + lambda * wj.signum()).abs() };
        m.max(v)
    })
}

/// Monotone FISTA with backtracking on the Lipschitz estimate.
fn fit_l1(pb: &Problem, opts: &TrainOptions) -> RegularizedFit {
    let p = pb.x.n_cols();
    let (mut b, mut w) = (0.0, vec![0.0; p]);
    let mut f = pb.objective(b, &w);
    let mut trace = vec![f];
    let (mut yb, mut yw) = (b, w.clone());
    let mut t = 1.0f64;
    let mut lip = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if iterations % 10 == 0 {
            let (gb, gw, _) = pb.loss_gradient(b, &w);
            if l1_violation(gb, &gw, &w, pb.lambda) < opts.tol {
                converged = true;
                break;
            }
        }
        iterations += 1;
        let y_eta = pb.eta(yb, &yw);
        let y_loss = pb.loss_from_eta(&y_eta);
        let (gb, gw, _) = pb.loss_gradient(yb, &yw);
        let (zb, zw, z_obj) = loop {
            let zb = yb - gb / lip;
            let zw: Vec<f64> =
                yw.iter().zip(&gw).map(|(y, g)| soft_threshold(y - g / lip, pb.lambda / lip)).collect();
            let db = zb - yb;
            let dw: Vec<f64> = zw.iter().zip(&yw).map(|(z, y)| z - y).collect();
            let z_loss = pb.loss_from_eta(&pb.eta(zb, &zw));
            let quad = y_loss + gb * db + dot(&gw, &dw) + 0.5 * lip * (db * db + dot(&dw, &dw));
            if z_loss <= quad + 1e-12 * quad.abs() || lip > 1e12 {
                let obj = z_loss + pb.penalty(&zw);
                break (zb, zw, obj);
            }
            lip *= 2.0;
        };
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let (prev_b, prev_w) = (b, w.clone());
        if z_obj <= f {
            b = zb;
            w = zw.clone();
            f = z_obj;
        }
        yb = b + (t / t_next) * (zb - b) + ((t - 1.0) / t_next) * (b - prev_b);
        yw = w
            .iter()
            .zip(&zw)
            .zip(&prev_w)
            .map(|((x, z), xp)| x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - xp))
            .collect();
        t = t_next;
        trace.push(f);
    }
    RegularizedFit { intercept: b, weights: w, iterations, converged, objective_trace: trace }
}

/// Minimizes the regularized logistic loss. Fails on non-finite inputs,
/// naming the column.
pub fn fit_regularized(
    x: &CsrMatrix,
    columns: &[String],
    y: &[bool],
    norm: Norm,
    reg_weight: f64,
    opts: &TrainOptions,
) -> Result<RegularizedFit> {
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.n_rows(), got: y.len() });
    }
    if columns.len() != x.n_cols() {
        return Err(Error::DimensionMismatch { expected: x.n_cols(), got: columns.len() });
    }
    if y.is_empty() {
        return Err(Error::EmptySplit("train"));
    }
    if !(reg_weight >= 0.0) || !reg_weight.is_finite() {
        return Err(Error::Invalid(format!("regularization weight must be non-negative, got {reg_weight}")));
    }
    for i in 0..x.n_rows() {
        let (idx, val) = x.row(i);
        if let Some(k) = val.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(columns[idx[k] as usize].clone()));
        }
    }
    let pb = Problem { x, y: y.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect(), lambda: reg_weight, norm };
    let fit = match norm {
        Norm::L2 => fit_l2(&pb, opts),
        Norm::L1 => fit_l1(&pb, opts),
    };
    if !fit.intercept.is_finite() || fit.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numeric("training produced non-finite weights".into()));
    }
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub task: String,
    pub trained_on: String,
    pub n_train: usize,
    pub n_topics: usize,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    /// Fraction of weights that are exactly zero.
    pub sparsity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankerModel {
    pub version: u32,
    pub norm: Norm,
    pub reg_weight: f64,
    pub seed: u64,
    pub intercept: f64,
    pub weights: IndexMap<String, f64>,
    pub encoder: Encoder,
    pub metadata: ModelMetadata,
}

impl RankerModel {
    /// Trains on an encoded design. The optimizer is deterministic; `seed`
    /// is recorded so runs can be traced back.
    pub fn train(
        encoder: Encoder,
        x: &CsrMatrix,
        y: &[bool],
        norm: Norm,
        reg_weight: f64,
        seed: u64,
        task: &str,
    ) -> Result<Self> {
        let columns = encoder.columns();
        let fit = fit_regularized(x, &columns, y, norm, reg_weight, &TrainOptions::default())?;
        let zeros = fit.weights.iter().filter(|&&w| w == 0.0).count();
        let metadata = ModelMetadata {
            task: task.to_string(),
            trained_on: "train".into(),
            n_train: y.len(),
            n_topics: encoder.n_topics,
            iterations: fit.iterations,
            converged: fit.converged,
            objective: *fit.objective_trace.last().expect("trace starts non-empty"),
            sparsity: if fit.weights.is_empty() { 0.0 } else { zeros as f64 / fit.weights.len() as f64 },
        };
        Ok(RankerModel {
            version: MODEL_VERSION,
            norm,
            reg_weight,
            seed,
            intercept: fit.intercept,
            weights: columns.into_iter().zip(fit.weights).collect(),
            encoder,
            metadata,
        })
    }

    pub fn n_columns(&self) -> usize {
        self.weights.len()
    }

    fn dense_weights(&self) -> Vec<f64> {
        self.weights.values().copied().collect()
    }

    /// Pre-sigmoid scores.
    pub fn linear_scores(&self, x: &CsrMatrix) -> Result<Vec<f64>> {
        if x.n_cols() != self.n_columns() {
            return Err(Error::DimensionMismatch { expected: self.n_columns(), got: x.n_cols() });
        }
        let w = self.dense_weights();
        Ok(x.matvec(&w).into_iter().map(|e| e + self.intercept).collect())
    }

    pub fn write_json<W: std::io::Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }

    pub fn read_json<R: std::io::Read>(reader: R) -> Result<Self> {
        let model: RankerModel = serde_json::from_reader(reader)?;
        if model.version != MODEL_VERSION {
            return Err(Error::Invalid(format!("unsupported model version {}", model.version)));
        }
        if model.weights.keys().ne(model.encoder.columns().iter()) {
            return Err(Error::Invalid("model weights do not match the encoder columns".into()));
        }
        Ok(model)
    }
}

/// Attackability scores in (0, 1).
pub fn score_sentences(model: &RankerModel, x: &CsrMatrix) -> Result<Vec<f64>> {
    Ok(model.linear_scores(x)?.into_iter().map(sigmoid).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub norm: Norm,
    pub reg_weight: f64,
    pub val_auc: f64,
    pub sparsity: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub entries: Vec<GridEntry>,
    pub chosen: usize,
}

impl GridResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("norm,reg_weight,val_auc,sparsity,converged,chosen\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{},{:e},{:.4},{:.4},{},{}\n",
                e.norm.name(),
                e.reg_weight,
                e.val_auc,
                e.sparsity,
                e.converged,
                u8::from(i == self.chosen)
            ));
        }
        out
    }
}

/// Index of the best configuration: highest AUC, then smaller weight,
/// then L2 before L1.
pub fn select_configuration(entries: &[GridEntry]) -> Option<usize> {
    (0..entries.len()).min_by(|&a, &b| {
        let (ea, eb) = (&entries[a], &entries[b]);
        eb.val_auc
            .total_cmp(&ea.val_auc)
            .then(ea.reg_weight.total_cmp(&eb.reg_weight))
            .then((ea.norm == Norm::L1).cmp(&(eb.norm == Norm::L1)))
    })
}

pub struct GridOutcome {
    pub grid: GridResult,
    pub model: RankerModel,
}

/// Trains every {L2, L1} × reg-weight configuration once, in parallel,
/// and keeps the one with the highest pooled validation AUC.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    encoder: &Encoder,
    x_train: &CsrMatrix,
    y_train: &[bool],
    x_val: &CsrMatrix,
    y_val: &[bool],
    seed: u64,
    task: &str,
) -> Result<GridOutcome> {
    let configs: Vec<(Norm, f64)> =
        [Norm::L2, Norm::L1].iter().flat_map(|&n| GRID_REG_WEIGHTS.iter().map(move |&r| (n, r))).collect();
    let trained: Vec<(RankerModel, f64)> = configs
        .par_iter()
        .map(|&(norm, reg)| {
            let model = RankerModel::train(encoder.clone(), x_train, y_train, norm, reg, seed, task)?;
            let scores = model.linear_scores(x_val)?;
            let val_auc = auc(&scores, y_val)?;
            Ok((model, val_auc))
        })
        .collect::<Result<_>>()?;
    let entries: Vec<GridEntry> = trained
        .iter()
        .map(|(m, a)| GridEntry {
            norm: m.norm,
            reg_weight: m.reg_weight,
            val_auc: *a,
            sparsity: m.metadata.sparsity,
            converged: m.metadata.converged,
        })
        .collect();
    let chosen = select_configuration(&entries).expect("grid is not empty");
    let model = trained.into_iter().nth(chosen).expect("chosen index in range").0;
    Ok(GridOutcome { grid: GridResult { entries, chosen }, model })
}

/// Scores are sentence character lengths.
pub fn baseline_length(sentences: &[&str]) -> Vec<f64> {
    sentences.iter().map(|s| s.chars().count() as f64).collect()
}

/// Uniform scores drawn from a generator keyed by post id and seed.
pub fn baseline_random(post_id: &str, n_sentences: usize, seed: u64) -> Vec<f64> {
    let digest = Sha256::new().chain_update(post_id.as_bytes()).chain_update(seed.to_le_bytes()).finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    let mut rng = ChaCha8Rng::from_seed(key);
    (0..n_sentences).map(|_| rng.random::<f64>()).collect()
}

/// Sentence indices from best to worst; ties go to the lower index.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    rank_order(scores)
}

/// The systems compared in evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Scorer {
    Logistic(Box<RankerModel>),
    Length,
    Random { seed: u64 },
}

impl Scorer {
    pub fn name(&self) -> &'static str {
        match self {
            Scorer::Logistic(_) => "LR",
            Scorer::Length => "Length",
            Scorer::Random { .. } => "Random",
        }
    }
}
