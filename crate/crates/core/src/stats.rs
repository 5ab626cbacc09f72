//! Maximum-likelihood logistic regression, Wald tests and per-feature
//! effect estimates controlling for post domain.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;

pub const SEPARATION_RIDGE: f64 = 1e-6;
const SEPARATION_ETA: f64 = 30.0;
const SEPARATION_RCOND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Bound on the 2-norm of the mean log-likelihood gradient.
    pub tol: f64,
    /// Ridge penalty on every column except column 0 (the intercept).
    pub ridge: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iter: 100, tol: 1e-10, ridge: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub coefficients: Vec<f64>,
    /// p×p, row-major.
    pub covariance: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Refit with a small ridge because of separation or non-convergence.
    pub jittered: bool,
    pub log_likelihood: f64,
    pub gradient_norm: f64,
}

impl LogisticFit {
    pub fn std_error(&self, j: usize) -> f64 {
        let p = self.coefficients.len();
        self.covariance[j * p + j].max(0.0).sqrt()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^x) without overflow.
fn log1pexp(x: f64) -> f64 {
    if x > 35.0 {
        x
    } else if x < -35.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

fn penalized_loglik(x: &CsrMatrix, y: &[f64], beta: &[f64], ridge: f64) -> f64 {
    let ll: f64 = (0..x.n_rows())
        .map(|i| {
            let eta = x.row_dot(i, beta);
            y[i] * eta - log1pexp(eta)
        })
        .sum();
    ll - 0.5 * ridge * beta[1..].iter().map(|b| b * b).sum::<f64>()
}

/// Columns that are linear combinations of earlier columns (including
/// all-zero columns), found from the pivots of the Gram matrix.
pub fn dependent_columns(x: &CsrMatrix) -> Vec<usize> {
    let p = x.n_cols();
    let g = DMatrix::from_row_slice(p, p, &x.weighted_gram(&vec![1.0; x.n_rows()]));
    let mut kept: Vec<usize> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..p {
        let gjj = g[(j, j)];
        let residual = if kept.is_empty() {
            gjj
        } else {
            let sub = g.select_rows(&kept).select_columns(&kept);
            let col = DVector::from_iterator(kept.len(), kept.iter().map(|&k| g[(k, j)]));
            match sub.cholesky() {
                Some(ch) => gjj - col.dot(&ch.solve(&col)),
                None => 0.0,
            }
        };
        if gjj <= 0.0 || residual <= 1e-9 * gjj {
            dependent.push(j);
        } else {
            kept.push(j);
        }
    }
    dependent
}

fn newton(x: &CsrMatrix, y: &[f64], opts: &FitOptions) -> Result<(LogisticFit, f64, f64)> {
    let n = x.n_rows();
    let p = x.n_cols();
    let mut beta = vec![0.0; p];
    let mut ll = penalized_loglik(x, y, &beta, opts.ridge);
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm;
    let penalty = |j: usize| if j == 0 { 0.0 } else { opts.ridge };
    let mut hessian;
    loop {
        let eta = x.matvec(&beta);
        let mu: Vec<f64> = eta.iter().map(|&e| sigmoid(e)).collect();
        let resid: Vec<f64> = y.iter().zip(&mu).map(|(y, m)| y - m).collect();
        let mut grad = x.tmatvec(&resid);
        for (j, g) in grad.iter_mut().enumerate() {
            *g -= penalty(j) * beta[j];
        }
        let w: Vec<f64> = mu.iter().map(|m| m * (1.0 - m)).collect();
        hessian = DMatrix::from_row_slice(p, p, &x.weighted_gram(&w));
        for j in 0..p {
            hessian[(j, j)] += penalty(j);
        }
        grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt() / n as f64;
        if !grad_norm.is_finite() {
            return Err(Error::Numeric("non-finite gradient".into()));
        }
        if grad_norm < opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;
        let Some(ch) = hessian.clone().cholesky() else { break };
        let step = ch.solve(&DVector::from_vec(grad));
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + t * s).collect();
            let trial_ll = penalized_loglik(x, y, &trial, opts.ridge);
            if trial_ll >= ll - 1e-12 * ll.abs().max(1.0) {
                beta = trial;
                ll = trial_ll;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let max_eta = x.matvec(&beta).iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let eig = hessian.clone().symmetric_eigen();
    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let rcond = if hi > 0.0 { lo / hi } else { 0.0 };
    let cov = hessian
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .or_else(|| hessian.clone().try_inverse())
        .ok_or_else(|| Error::Numeric("singular Hessian".into()))?;
    let cov = (&cov + cov.transpose()) * 0.5;
    let fit = LogisticFit {
        coefficients: beta,
        covariance: cov.transpose().as_slice().to_vec(),
        iterations,
        converged,
        jittered: false,
        log_likelihood: ll,
        gradient_norm: grad_norm,
    };
    Ok((fit, max_eta, rcond))
}

/// Newton–Raphson with step halving. Column 0 is the intercept. On
/// separation (huge linear predictor or an ill-conditioned Hessian) or
/// non-convergence the fit is redone with ridge `SEPARATION_RIDGE` and
/// flagged. Exactly collinear columns are rejected up front.
pub fn fit_logistic(x: &CsrMatrix, names: &[String], y: &[f64], opts: &FitOptions) -> Result<LogisticFit> {
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.n_rows(), got: y.len() });
    }
    if names.len() != x.n_cols() {
        return Err(Error::DimensionMismatch { expected: x.n_cols(), got: names.len() });
    }
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Invalid("response must be 0 or 1".into()));
    }
    let dependent = dependent_columns(x);
    if !dependent.is_empty() {
        return Err(Error::Collinear(dependent.into_iter().map(|j| names[j].clone()).collect()));
    }
    let (fit, max_eta, rcond) = newton(x, y, opts)?;
    let separated = max_eta > SEPARATION_ETA || rcond < SEPARATION_RCOND;
    if fit.converged && !separated {
        return Ok(fit);
    }
    if opts.ridge >= SEPARATION_RIDGE {
        if fit.converged {
            return Ok(LogisticFit { jittered: true, ..fit });
        }
        return Err(Error::Numeric("logistic regression did not converge".into()));
    }
    let retry = FitOptions { ridge: SEPARATION_RIDGE, ..*opts };
    let (fit, _, _) = newton(x, y, &retry)?;
    if !fit.converged {
        return Err(Error::Numeric("logistic regression did not converge after ridge jitter".into()));
    }
    Ok(LogisticFit { jittered: true, ..fit })
}

/// Two-sided Wald test: `z = β / SE`, `p = 2(1 − Φ(|z|))`.
pub fn wald_test(beta: f64, std_error: f64) -> Result<(f64, f64)> {
    if !(std_error > 0.0) || !std_error.is_finite() {
        return Err(Error::Numeric(format!("standard error must be positive, got {std_error}")));
    }
    let z = beta / std_error;
    Ok((z, erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)))
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Attacked,
    Successful,
}

impl Response {
    pub fn name(self) -> &'static str {
        match self {
            Response::Attacked => "attacked",
            Response::Successful => "successful",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimate {
    pub feature: String,
    pub response: Response,
    pub beta: f64,
    pub odds_ratio: f64,
    pub std_error: f64,
    pub wald_z: f64,
    pub p_value: f64,
    pub stars: String,
    pub n_obs: usize,
    pub jittered: bool,
}

fn standardize(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if sd > 0.0 {
        values.iter().map(|v| (v - mean) / sd).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Fits `logit P(Y) = β0 + βX·X + Σ α_d D_d` with one indicator per domain
/// except the smallest domain id (the reference).
pub fn feature_effect(
    name: &str,
    values: &[f64],
    labels: &[bool],
    domains: &[usize],
    standardize_x: bool,
    response: Response,
) -> Result<EffectEstimate> {
    if values.len() != labels.len() || values.len() != domains.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: values.len() });
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{name} ({bad})")));
    }
    let levels: Vec<usize> = domains.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let varies = levels.iter().any(|&d| {
        let mut vals = values.iter().zip(domains).filter(|(_, &dd)| dd == d).map(|(v, _)| *v);
        let first = vals.next();
        vals.any(|v| Some(v) != first)
    });
    if !varies {
        return Err(Error::NoWithinDomainVariation(name.to_string()));
    }
    let x: Vec<f64> = if standardize_x { standardize(values) } else { values.to_vec() };
    let p = 2 + levels.len().saturating_sub(1);
    let mut design = CsrMatrix::new(p);
    for (i, &d) in domains.iter().enumerate() {
        let mut row = vec![(0u32, 1.0), (1, x[i])];
        let level = levels.binary_search(&d).expect("domain level");
        if level > 0 {
            row.push((1 + level as u32, 1.0));
        }
        design.push_row(row);
    }
    let mut names = vec!["(intercept)".to_string(), name.to_string()];
    names.extend(levels.iter().skip(1).map(|d| format!("domain_{d}")));
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    let fit = fit_logistic(&design, &names, &y, &FitOptions::default())?;
    let beta = fit.coefficients[1];
    let se = fit.std_error(1);
    let (z, pv) = wald_test(beta, se)?;
    Ok(EffectEstimate {
        feature: name.to_string(),
        response,
        beta,
        odds_ratio: beta.exp(),
        std_error: se,
        wald_z: z,
        p_value: pv,
        stars: stars(pv).to_string(),
        n_obs: labels.len(),
        jittered: fit.jittered,
    })
}

/// A feature column for the effects table.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectInput {
    pub name: String,
    pub values: Vec<f64>,
    pub standardize: bool,
}

/// Per-sentence labels and domain, aligned with every `EffectInput`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectObservation {
    pub attacked: bool,
    pub successful: bool,
    pub domain: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectRow {
    pub feature: String,
    pub response: Response,
    pub estimate: Option<EffectEstimate>,
    /// Why the estimate is missing, or "ridge" when the fit was jittered.
    pub flags: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EffectsTable {
    pub rows: Vec<EffectRow>,
}

/// Fits every feature against both responses in parallel. The attacked
/// response uses all observations; the successful response uses attacked
/// observations only. Failed fits stay in the table with a flag.
pub fn effects_report(inputs: &[EffectInput], obs: &[EffectObservation]) -> EffectsTable {
    let attacked_rows: Vec<usize> = (0..obs.len()).filter(|&i| obs[i].attacked).collect();
    let jobs: Vec<(usize, Response)> =
        (0..inputs.len()).flat_map(|i| [(i, Response::Attacked), (i, Response::Successful)]).collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, response)| {
            let input = &inputs[i];
            let rows: Vec<usize> = match response {
                Response::Attacked => (0..obs.len()).collect(),
                Response::Successful => attacked_rows.clone(),
            };
            let values: Vec<f64> = rows.iter().map(|&r| input.values[r]).collect();
            let labels: Vec<bool> = rows
                .iter()
                .map(|&r| match response {
                    Response::Attacked => obs[r].attacked,
                    Response::Successful => obs[r].successful,
                })
                .collect();
            let domains: Vec<usize> = rows.iter().map(|&r| obs[r].domain).collect();
            let result = if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
                Err(Error::Invalid("response has a single class".into()))
            } else {
                feature_effect(&input.name, &values, &labels, &domains, input.standardize, response)
            };
            match result {
                Ok(e) => EffectRow {
                    feature: input.name.clone(),
                    response,
                    flags: if e.jittered { "ridge".into() } else { String::new() },
                    estimate: Some(e),
                },
                Err(e) => EffectRow {
                    feature: input.name.clone(),
                    response,
                    estimate: None,
                    flags: match e {
                        Error::NoWithinDomainVariation(_) => "no_within_domain_variation".into(),
                        Error::Collinear(_) => "collinear".into(),
                        other => other.to_string().replace(',', ";"),
                    },
                },
            }
        })
        .collect();
    EffectsTable { rows }
}

/// Shared number formatting so CSV and HTML carry identical strings.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || (x.abs() >= 1e-4 && x.abs() < 1e6) {
        format!("{x:.4}")
    } else {
        format!("{x:.4e}")
    }
}

impl EffectsTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,response,beta,or,se,z,p,stars,flags,n\n");
        for r in &self.rows {
            match &r.estimate {
                Some(e) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{},{}",
                        r.feature,
                        r.response.name(),
                        fmt_num(e.beta),
                        fmt_num(e.odds_ratio),
                        fmt_num(e.std_error),
                        fmt_num(e.wald_z),
                        fmt_num(e.p_value),
                        e.stars,
                        r.flags,
                        e.n_obs
                    );
                }
                None => {
                    let _ = writeln!(out, "{},{},,,,,,,{},", r.feature, r.response.name(), r.flags);
                }
            }
        }
        out
    }

    /// Odds ratios with stars, one column per response, as a `<table>`
    /// fragment followed by the significance legend.
    pub fn to_html_table(&self) -> String {
        let mut features: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !features.contains(&r.feature.as_str()) {
                features.push(&r.feature);
            }
        }
        let cell = |f: &str, resp: Response| -> String {
            match self.rows.iter().find(|r| r.feature == f && r.response == resp) {
                Some(EffectRow { estimate: Some(e), .. }) => format!(
                    "<td class=\"or\" data-p=\"{}\">{}{}</td>",
                    fmt_num(e.p_value),
                    fmt_num(e.odds_ratio),
                    e.stars
                ),
                Some(r) => format!("<td class=\"na\">n/a ({})</td>", html_escape(&r.flags)),
                None => "<td class=\"na\">n/a</td>".into(),
            }
        };
        let mut out = String::from(
            "<table>\n<thead><tr><th>feature</th><th>attacked</th><th>successful</th></tr></thead>\n<tbody>\n",
        );
        for f in features {
            let _ = writeln!(
                out,
                "<tr><td>{}</td>{}{}</tr>",
                html_escape(f),
                cell(f, Response::Attacked),
                cell(f, Response::Successful)
            );
        }
        out.push_str("</tbody>\n</table>\n<p>*: p&lt;0.05, **: p&lt;0.01, ***: p&lt;0.001</p>\n");
        out
    }

    /// Standalone XHTML page around `to_html_table`.
    pub fn to_html(&self) -> String {
        format!(
            "<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\">\n<head><meta charset=\"utf-8\"/>\
             <title>Feature effects</title></head>\n<body>\n<div>\n{}</div>\n</body>\n</html>\n",
            self.to_html_table()
        )
    }
}

pub fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_by_two(a: usize, b: usize, c: usize, d: usize) -> (CsrMatrix, Vec<f64>) {
        let mut x = CsrMatrix::new(2);
        let mut y = Vec::new();
        for (xv, yv, n) in [(1.0, 1.0, a), (1.0, 0.0, b), (0.0, 1.0, c), (0.0, 0.0, d)] {
            for _ in 0..n {
                x.push_row([(0, 1.0), (1, xv)]);
                y.push(yv);
            }
        }
        (x, y)
    }

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("c{j}")).collect()
    }

    /// Two-sided normal tail by composite Simpson quadrature of the density.
    fn tail_oracle(z: f64) -> f64 {
        let a = z.abs();
        let b = a + 40.0;
        let n = 400_000;
        let h = (b - a) / n as f64;
        let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = phi(a) + phi(b);
        for i in 1..n {
            s += phi(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        2.0 * s * h / 3.0
    }

    #[test]
    fn closed_form_odds_ratio() {
        let (x, y) = two_by_two(30, 70, 10, 90);
        let fit = fit_logistic(&x, &names(2), &y, &FitOptions::default()).unwrap();
        assert!((fit.coefficients[1].exp() - 27.0 / 7.0).abs() < 1e-6);
        assert!(fit.converged && !fit.jittered);
        // standard error of the log odds ratio: sqrt(1/a + 1/b + 1/c + 1/d)
        let se = (1.0 / 30.0 + 1.0 / 70.0 + 1.0 / 10.0 + 1.0 / 90.0f64).sqrt();
        assert!((fit.std_error(1) - se).abs() < 1e-8);
    }

    #[test]
    fn null_effect() {
        let (x, y) = two_by_two(20, 80, 10, 40);
        let fit = fit_logistic(&x, &names(2), &y, &FitOptions::default()).unwrap();
        assert!((fit.coefficients[1].exp() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn recovers_true_coefficient() {
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = CsrMatrix::new(2);
            let mut y = Vec::new();
            for _ in 0..5000 {
                let v: f64 = rng.random::<f64>() * 4.0 - 2.0;
                x.push_row([(0, 1.0), (1, v)]);
                y.push(if rng.random::<f64>() < sigmoid(-0.3 + 0.7 * v) { 1.0 } else { 0.0 });
            }
            let fit = fit_logistic(&x, &names(2), &y, &FitOptions::default()).unwrap();
            assert!((fit.coefficients[1] - 0.7).abs() < 0.1);
        }
    }

    #[test]
    fn gradient_and_covariance_properties() {
        let (x, y) = two_by_two(13, 21, 8, 40);
        let fit = fit_logistic(&x, &names(2), &y, &FitOptions::default()).unwrap();
        assert!(fit.gradient_norm < 1e-10);
        let c = &fit.covariance;
        assert!((c[1] - c[2]).abs() < 1e-12);
        let m = DMatrix::from_row_slice(2, 2, c);
        assert!(m.symmetric_eigen().eigenvalues.iter().all(|&e| e >= -1e-8));
    }

    #[test]
    fn collinear_columns_named() {
        let mut x = CsrMatrix::new(3);
        for i in 0..20 {
            let v = (i % 3) as f64;
            x.push_row([(0, 1.0), (1, v), (2, 2.0 * v)]);
        }
        let y: Vec<f64> = (0..20).map(|i| (i % 2) as f64).collect();
        let names = vec!["(intercept)".to_string(), "a".to_string(), "b".to_string()];
        match fit_logistic(&x, &names, &y, &FitOptions::default()) {
            Err(Error::Collinear(cols)) => assert_eq!(cols, vec!["b".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wald_values() {
        assert_eq!(wald_test(0.0, 1.0).unwrap(), (0.0, 1.0));
        let (_, p) = wald_test(1.959964, 1.0).unwrap();
        assert!((p - 0.05).abs() < 1e-5);
        assert_eq!(wald_test(2.5, 1.0).unwrap().1, wald_test(-2.5, 1.0).unwrap().1);
        assert!(wald_test(1.0, 0.0).is_err());
        assert!(wald_test(1.0, -1.0).is_err());
    }

    #[test]
    fn wald_matches_quadrature() {
        let mut z = -6.0;
        while z <= 6.0 {
            let (_, p) = wald_test(z, 1.0).unwrap();
            assert!((p - tail_oracle(z)).abs() < 1e-8, "z={z}");
            z += 0.25;
        }
    }

    #[test]
    fn separation_is_jittered() {
        let values: Vec<f64> = (0..100).map(|i| if i < 30 { 1.0 } else { 0.0 }).collect();
        let labels: Vec<bool> = (0..100).map(|i| i < 30 || i % 7 == 0).collect();
        let domains = vec![0; 100];
        let e = feature_effect("x", &values, &labels, &domains, false, Response::Attacked).unwrap();
        assert!(e.jittered);
        assert!(e.odds_ratio > 100.0);
    }

    #[test]
    fn no_within_domain_variation() {
        let values = vec![1.0, 1.0, 0.0, 0.0];
        let labels = vec![true, false, true, false];
        let domains = vec![0, 0, 1, 1];
        assert!(matches!(
            feature_effect("x", &values, &labels, &domains, false, Response::Attacked),
            Err(Error::NoWithinDomainVariation(_))
        ));
    }

    #[test]
    fn standardization_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 400;
        let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let domains: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let labels: Vec<bool> = values.iter().map(|v| rng.random::<f64>() < sigmoid(2.0 * v - 1.0)).collect();
        let scaled: Vec<f64> = values.iter().map(|v| v * 10.0).collect();
        let a = feature_effect("x", &values, &labels, &domains, true, Response::Attacked).unwrap();
        let b = feature_effect("x", &scaled, &labels, &domains, true, Response::Attacked).unwrap();
        assert!((a.beta - b.beta).abs() < 1e-9);
        assert!((a.p_value - b.p_value).abs() < 1e-9);
    }

    #[test]
    fn report_csv_and_html_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 600;
        let strong: Vec<f64> = (0..n).map(|_| if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 }).collect();
        let obs: Vec<EffectObservation> = strong
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let attacked = rng.random::<f64>() < if s > 0.0 { 0.7 } else { 0.2 };
                EffectObservation { attacked, successful: attacked && rng.random::<f64>() < 0.3 + 0.3 * s, domain: i % 4 }
            })
            .collect();
        let inputs = vec![EffectInput { name: "strong".into(), values: strong, standardize: false }];
        let table = effects_report(&inputs, &obs);
        let csv = table.to_csv();
        let html = table.to_html();
        let att = table.rows.iter().find(|r| r.response == Response::Attacked).unwrap().estimate.clone().unwrap();
        assert!(att.odds_ratio > 1.0 && att.stars == "***");
        for r in &table.rows {
            let e = r.estimate.as_ref().unwrap();
            assert!(csv.contains(&fmt_num(e.odds_ratio)));
            assert!(html.contains(&format!("{}{}", fmt_num(e.odds_ratio), e.stars)));
        }
        let opts = roxmltree::ParsingOptions { allow_dtd: true, ..Default::default() };
        roxmltree::Document::parse_with_options(&html, opts).unwrap();
        let empty = effects_report(&[], &obs);
        assert_eq!(empty.to_csv().lines().count(), 1);
    }

    proptest! {
        #[test]
        fn sign_matches_sample_odds_ratio(a in 1usize..40, b in 1usize..40, c in 1usize..40, d in 1usize..40) {
            let (x, y) = two_by_two(a, b, c, d);
            let fit = fit_logistic(&x, &names(2), &y, &FitOptions::default()).unwrap();
            let log_or = ((a * d) as f64 / (b * c) as f64).ln();
            prop_assert!((fit.coefficients[1] - log_or).abs() < 1e-6);
        }
    }
}
