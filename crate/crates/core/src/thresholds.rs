//! Recovery-condition predicates: sufficient and necessary thresholds for
//! exact recovery, each reported with its two sides, margin, and (where
//! available) an explicit error bound.
//!
//! Asymptotic o(1) qualifiers are evaluated at 0 and flagged in the report's
//! parameters map, so desk-scale evaluations are explicit about what was
//! dropped.

use std::collections::BTreeMap;

use crate::divergence::DivergenceProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Recovery succeeds when margin = lhs - rhs >= 0.
    Sufficient,
    /// Recovery is impossible (to the stated error level) when margin <= 0.
    Necessary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub name: String,
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub direction: Direction,
    /// For sufficient conditions: an upper bound on the error probability.
    /// For necessary conditions: a lower bound when satisfied.
    pub error_bound: Option<f64>,
    /// Named inputs plus unit-valued flags (e.g. asymptotic_term_omitted).
    pub parameters: BTreeMap<String, f64>,
}

impl ThresholdReport {
    fn build(
        name: &str,
        direction: Direction,
        lhs: f64,
        rhs: f64,
        error_bound: Option<f64>,
        parameters: BTreeMap<String, f64>,
    ) -> Self {
        let margin = lhs - rhs;
        let satisfied = match direction {
            Direction::Sufficient => margin >= 0.0,
            Direction::Necessary => margin <= 0.0,
        };
        ThresholdReport { name: name.into(), satisfied, lhs, rhs, margin, direction, error_bound, parameters }
    }
}

fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Binary entropy in nats, with H(0) = H(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(x));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.ln() };
    Ok(term(x) + term(1.0 - x))
}

fn check_common(n: usize, p_obs: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    if !(p_obs > 0.0 && p_obs <= 1.0) {
        return Err(Error::BadParam(format!("p_obs {p_obs} outside (0,1]")));
    }
    Ok(())
}

/// Sufficient condition for exact recovery on a dense random measurement
/// graph: sup_alpha (1-alpha) Hel_alpha^min * (p_obs n) must exceed
/// (1+delta) ln(2n) + 2 ln(M-1). The reported error bound omits an
/// asymptotic term with unspecified universal constants (flagged).
pub fn thm1_sufficient(
    n: usize,
    m: usize,
    p_obs: f64,
    profile: &DivergenceProfile,
    delta: f64,
) -> Result<ThresholdReport> {
    check_common(n, p_obs)?;
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    if delta <= 0.0 {
        return Err(Error::BadParam(format!("delta must be > 0, got {delta}")));
    }
    let nf = n as f64;
    let lhs = profile.sup_alpha_term * p_obs * nf;
    let rhs = (1.0 + delta) * (2.0 * nf).ln() + 2.0 * ((m - 1) as f64).ln();
    let expo = (0.75 * delta - 0.25 * delta * delta).max(0.5 * (delta - 1.0));
    let error_bound = 1.0 / ((2.0 * nf).powf(expo) - 1.0) + 3.0 / (nf.powi(10) - 1.0);
    Ok(ThresholdReport::build(
        "dense-random-graph-sufficient",
        Direction::Sufficient,
        lhs,
        rhs,
        Some(error_bound),
        params([
            ("n", nf),
            ("m", m as f64),
            ("p_obs", p_obs),
            ("delta", delta),
            ("sup_alpha_term", profile.sup_alpha_term),
            ("argmax_alpha", profile.argmax_alpha),
            ("asymptotic_term_omitted", 1.0),
        ]),
    ))
}

/// Necessary condition (KL form) on a dense random graph: if
/// kl_min p_obs n falls below [(1-eps)(ln n + ln m_kl) - H(eps)] /
/// [(1+eps)(1+zeta)], every decoder errs with probability at least
/// eps - n^(-10).
pub fn thm3a_necessary(
    n: usize,
    p_obs: f64,
    kl_min: f64,
    m_kl: usize,
    zeta: f64,
    epsilon: f64,
) -> Result<ThresholdReport> {
    check_common(n, p_obs)?;
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::BadParam(format!("epsilon {epsilon} outside (0, 1/2]")));
    }
    if zeta < 0.0 || kl_min < 0.0 || m_kl < 1 {
        return Err(Error::BadParam("zeta, kl_min must be >= 0 and m_kl >= 1".into()));
    }
    let nf = n as f64;
    let lhs = kl_min * p_obs * nf;
    let rhs = ((1.0 - epsilon) * (nf.ln() + (m_kl as f64).ln()) - binary_entropy(epsilon)?)
        / ((1.0 + epsilon) * (1.0 + zeta));
    let mut p = params([
        ("n", nf),
        ("p_obs", p_obs),
        ("kl_min", kl_min),
        ("m_kl", m_kl as f64),
        ("zeta", zeta),
        ("epsilon", epsilon),
    ]);
    // The underlying result assumes p_obs exceeds (c ln n)/n for an
    // unspecified large c; warn rather than guess c.
    if p_obs * nf / nf.ln() < 10.0 {
        p.insert("p_obs_precondition_weak".into(), 1.0);
    }
    let bound = epsilon - nf.powi(-10);
    Ok(ThresholdReport::build(
        "dense-random-graph-necessary-kl",
        Direction::Necessary,
        lhs,
        rhs,
        Some(bound),
        p,
    ))
}

/// Necessary condition (Hellinger form) on a dense random graph, with
/// residual r_eps = ln 2 + 2 (eps alpha ln n - ln 2)^2 / (n p_obs).
/// When satisfied, every decoder errs with probability at least
/// n^(-eps) - n^(-10).
pub fn thm3b_necessary(
    n: usize,
    p_obs: f64,
    hel_alpha_min: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<ThresholdReport> {
    check_common(n, p_obs)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadOrder(alpha));
    }
    if epsilon <= 0.0 {
        return Err(Error::BadParam(format!("epsilon must be > 0, got {epsilon}")));
    }
    if alpha > 1.0 / (1.0 + epsilon) {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds 1/(1+epsilon) = {}",
            1.0 / (1.0 + epsilon)
        )));
    }
    let nf = n as f64;
    if p_obs * nf <= 2.0 * epsilon * alpha * nf.ln() {
        return Err(Error::PreconditionViolated(format!(
            "p_obs n = {} must exceed 2 eps alpha ln n = {}",
            p_obs * nf,
            2.0 * epsilon * alpha * nf.ln()
        )));
    }
    let r_eps = std::f64::consts::LN_2
        + 2.0 * (epsilon * alpha * nf.ln() - std::f64::consts::LN_2).powi(2) / (nf * p_obs);
    let lhs = (1.0 - alpha) * hel_alpha_min * p_obs * nf;
    let rhs = epsilon * alpha * nf.ln() - r_eps;
    let bound = nf.powf(-epsilon) - nf.powi(-10);
    Ok(ThresholdReport::build(
        "dense-random-graph-necessary-hellinger",
        Direction::Necessary,
        lhs,
        rhs,
        Some(bound),
        params([
            ("n", nf),
            ("p_obs", p_obs),
            ("hel_alpha_min", hel_alpha_min),
            ("alpha", alpha),
            ("epsilon", epsilon),
            ("r_eps", r_eps),
        ]),
    ))
}

/// Sufficient condition for general connected graphs:
/// sup_alpha_term * mincut >= 8 tau_cut + (delta + 8) ln(2n) + 4 ln M,
/// with error bound 1/((2n)^delta - 1).
pub fn thm4_sufficient(
    n: usize,
    m: usize,
    mincut: usize,
    tau_cut: f64,
    sup_alpha_term: f64,
    delta: f64,
) -> Result<ThresholdReport> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    if mincut == 0 {
        return Err(Error::Disconnected);
    }
    if delta <= 0.0 {
        return Err(Error::BadParam(format!("delta must be > 0, got {delta}")));
    }
    let nf = n as f64;
    let lhs = sup_alpha_term * mincut as f64;
    let rhs = 8.0 * tau_cut + (delta + 8.0) * (2.0 * nf).ln() + 4.0 * (m as f64).ln();
    let error_bound = 1.0 / ((2.0 * nf).powf(delta) - 1.0);
    Ok(ThresholdReport::build(
        "general-graph-sufficient",
        Direction::Sufficient,
        lhs,
        rhs,
        Some(error_bound),
        params([
            ("n", nf),
            ("m", m as f64),
            ("mincut", mincut as f64),
            ("tau_cut", tau_cut),
            ("sup_alpha_term", sup_alpha_term),
            ("delta", delta),
        ]),
    ))
}

/// Necessary condition for general graphs (KL form). Recovery is impossible
/// when either the min-cut branch
/// kl_min mincut <= max{(1-eps) tau_cut - H(eps), [(1-eps) ln m_kl - H(eps)]/(1+zeta)}
/// or the max-degree branch
/// kl_min d_max <= [(1-eps)(ln n + ln m_kl) - H(eps)]/(1+zeta)
/// holds. The report carries the branch that fired (or came closest) in
/// parameters["branch"]: 1 = min-cut, 2 = max-degree.
#[allow(clippy::too_many_arguments)]
pub fn thm5_necessary(
    mincut: usize,
    d_max: usize,
    tau_cut: f64,
    kl_min: f64,
    m_kl: usize,
    n: usize,
    zeta: f64,
    epsilon: f64,
) -> Result<ThresholdReport> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::BadParam(format!("epsilon {epsilon} outside (0, 1/2]")));
    }
    if zeta < 0.0 || kl_min < 0.0 || m_kl < 1 || mincut == 0 {
        return Err(Error::BadParam("need zeta, kl_min >= 0, m_kl >= 1, mincut >= 1".into()));
    }
    let nf = n as f64;
    let h = binary_entropy(epsilon)?;
    let cut_rhs = ((1.0 - epsilon) * tau_cut - h)
        .max(((1.0 - epsilon) * (m_kl as f64).ln() - h) / (1.0 + zeta));
    let cut_lhs = kl_min * mincut as f64;
    let deg_rhs = ((1.0 - epsilon) * (nf.ln() + (m_kl as f64).ln()) - h) / (1.0 + zeta);
    let deg_lhs = kl_min * d_max as f64;
    // Report the branch with the larger slack rhs - lhs.
    let (branch, lhs, rhs) = if cut_rhs - cut_lhs >= deg_rhs - deg_lhs {
        (1.0, cut_lhs, cut_rhs)
    } else {
        (2.0, deg_lhs, deg_rhs)
    };
    Ok(ThresholdReport::build(
        "general-graph-necessary-kl",
        Direction::Necessary,
        lhs,
        rhs,
        Some(epsilon),
        params([
            ("mincut", mincut as f64),
            ("d_max", d_max as f64),
            ("tau_cut", tau_cut),
            ("kl_min", kl_min),
            ("m_kl", m_kl as f64),
            ("n", nf),
            ("zeta", zeta),
            ("epsilon", epsilon),
            ("branch", branch),
        ]),
    ))
}

/// Necessary condition for general graphs (Hellinger form):
/// (1-alpha) hel_alpha_min d_max <= eps alpha ln n - r_eps with
/// r_eps = ln 2 + 2 (eps alpha ln n - ln 2)^2 / d_max. When satisfied,
/// every decoder errs with probability at least n^(-eps).
pub fn thm6_necessary(
    d_max: usize,
    n: usize,
    hel_alpha_min: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<ThresholdReport> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadOrder(alpha));
    }
    if epsilon <= 0.0 {
        return Err(Error::BadParam(format!("epsilon must be > 0, got {epsilon}")));
    }
    if alpha > 1.0 / (1.0 + epsilon) {
        return Err(Error::PreconditionViolated(format!(
            "alpha = {alpha} exceeds 1/(1+epsilon) = {}",
            1.0 / (1.0 + epsilon)
        )));
    }
    let nf = n as f64;
    let dm = d_max as f64;
    if dm < 2.0 * epsilon * alpha * nf.ln() {
        return Err(Error::PreconditionViolated(format!(
            "d_max = {dm} below 2 eps alpha ln n = {}",
            2.0 * epsilon * alpha * nf.ln()
        )));
    }
    let r_eps = std::f64::consts::LN_2
        + 2.0 * (epsilon * alpha * nf.ln() - std::f64::consts::LN_2).powi(2) / dm;
    let lhs = (1.0 - alpha) * hel_alpha_min * dm;
    let rhs = epsilon * alpha * nf.ln() - r_eps;
    Ok(ThresholdReport::build(
        "general-graph-necessary-hellinger",
        Direction::Necessary,
        lhs,
        rhs,
        Some(nf.powf(-epsilon)),
        params([
            ("d_max", dm),
            ("n", nf),
            ("hel_alpha_min", hel_alpha_min),
            ("alpha", alpha),
            ("epsilon", epsilon),
            ("r_eps", r_eps),
        ]),
    ))
}

/// Outlier-model recovery corridor on a dense random graph: the achievable
/// side compares the Hellinger closed form against
/// (1+eps)(ln n + 2 ln M)/(p_obs n); the converse side bounds p_true by the
/// larger of the KL branch and the connectivity branch
/// (M/(M-1))(ln n/(p_obs n) - 1/M).
pub fn corollary1_outlier(
    n: usize,
    m: usize,
    p_obs: f64,
    p_true: f64,
    epsilon: f64,
) -> Result<(ThresholdReport, ThresholdReport)> {
    check_common(n, p_obs)?;
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::BadParam(format!("p_true {p_true} outside [0,1]")));
    }
    if epsilon <= 0.0 {
        return Err(Error::BadParam(format!("epsilon must be > 0, got {epsilon}")));
    }
    let nf = n as f64;
    let mf = m as f64;
    let base = params([
        ("n", nf),
        ("m", mf),
        ("p_obs", p_obs),
        ("p_true", p_true),
        ("epsilon", epsilon),
    ]);

    let hel_half_min = 2.0 / mf * ((1.0 - p_true + mf * p_true).sqrt() - (1.0 - p_true).sqrt()).powi(2);
    let ach = ThresholdReport::build(
        "outlier-achievable",
        Direction::Sufficient,
        hel_half_min / 2.0,
        (1.0 + epsilon) * (nf.ln() + 2.0 * mf.ln()) / (p_obs * nf),
        None,
        base.clone(),
    );

    // kl branch: p_true <= (1-eps)(ln n + ln M)/(p_obs n ln(1 + p M/(1-p))).
    // p_true = 0 makes the denominator 0 and the branch +inf (converse
    // trivially satisfied); p_true = 1 makes it 0.
    let kl_branch =
        (1.0 - epsilon) * (nf.ln() + mf.ln()) / (p_obs * nf * (1.0 + p_true * mf / (1.0 - p_true)).ln());
    let connectivity_branch = mf / (mf - 1.0) * (nf.ln() / (p_obs * nf) - 1.0 / mf);
    let mut conv_params = base;
    conv_params.insert("kl_branch".into(), kl_branch);
    conv_params.insert("connectivity_branch".into(), connectivity_branch);
    let conv = ThresholdReport::build(
        "outlier-converse",
        Direction::Necessary,
        p_true,
        kl_branch.max(connectivity_branch),
        None,
        conv_params,
    );
    Ok((ach, conv))
}

/// Two-community block-model thresholds: achievable when
/// (sqrt(a) - sqrt(b))^2 >= 2, impossible when (a - b)^2 <= a. The o(1)
/// terms are evaluated at 0 and flagged.
pub fn sbm_thresholds(a: f64, b: f64, n: usize) -> Result<(ThresholdReport, ThresholdReport)> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    if a < 0.0 || b < 0.0 {
        return Err(Error::BadParam("a and b must be >= 0".into()));
    }
    let nf = n as f64;
    let mut p = params([("a", a), ("b", b), ("n", nf), ("o1_set_to_zero", 1.0)]);
    if a * nf.ln() / nf > 1.0 || b * nf.ln() / nf > 1.0 {
        p.insert("outside_sparse_regime".into(), 1.0);
    }
    let ach = ThresholdReport::build(
        "sbm-achievable",
        Direction::Sufficient,
        (a.sqrt() - b.sqrt()).powi(2),
        2.0,
        None,
        p.clone(),
    );
    let conv = ThresholdReport::build(
        "sbm-converse",
        Direction::Necessary,
        (a - b).powi(2),
        a,
        None,
        p,
    );
    Ok((ach, conv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaplotypeGraphModel {
    Ring,
    ErdosRenyi,
}

/// Constants for the parity-read recovery conditions. The underlying
/// statements only assert existence; these defaults are artifact choices
/// with the sufficiency constant dominating the converse constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaplotypeConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
}

impl Default for HaplotypeConstants {
    fn default() -> Self {
        HaplotypeConstants { c1: 8.0, c2: 0.125, c3: 64.0, c4: 64.0, c5: 0.125 }
    }
}

/// Parity-read recovery thresholds: achievable when (1-2 theta)^2 exceeds
/// c1 ln n / L (ring) or c4 ln n / (L n p_obs) (random graph); impossible
/// below the matching c2 / c5 levels. Also records the order-level sample
/// count against the n ln n / (1-2 theta)^2 scaling target (`w` sets the
/// ring window for the count; random graphs need `p_obs`).
#[allow(clippy::too_many_arguments)]
pub fn haplotype_thresholds(
    theta: f64,
    reads: usize,
    n: usize,
    p_obs: Option<f64>,
    w: Option<usize>,
    model: HaplotypeGraphModel,
    c: HaplotypeConstants,
) -> Result<(ThresholdReport, ThresholdReport)> {
    if !(theta > 0.0 && theta < 0.5) {
        return Err(Error::BadParam(format!("theta {theta} outside (0, 1/2)")));
    }
    if reads < 1 || n < 2 {
        return Err(Error::BadParam("need reads >= 1 and n >= 2".into()));
    }
    let nf = n as f64;
    let lf = reads as f64;
    let gap2 = (1.0 - 2.0 * theta).powi(2);
    let target = nf * nf.ln() / gap2;
    let mut p = params([
        ("theta", theta),
        ("reads", lf),
        ("n", nf),
        ("samples_scaling_target", target),
    ]);
    let (ach_rhs, conv_rhs) = match model {
        HaplotypeGraphModel::Ring => {
            if let Some(w) = w {
                p.insert("samples".into(), nf * lf * w as f64);
            }
            (c.c1 * nf.ln() / lf, c.c2 * nf.ln() / lf)
        }
        HaplotypeGraphModel::ErdosRenyi => {
            let p_obs = p_obs
                .ok_or_else(|| Error::BadParam("random-graph model needs p_obs".into()))?;
            check_common(n, p_obs)?;
            p.insert("p_obs".into(), p_obs);
            p.insert("samples".into(), nf * (nf - 1.0) / 2.0 * p_obs * lf);
            if p_obs <= c.c3 * nf.ln() / nf {
                p.insert("p_obs_precondition_weak".into(), 1.0);
            }
            (c.c4 * nf.ln() / (lf * nf * p_obs), c.c5 * nf.ln() / (lf * nf * p_obs))
        }
    };
    let ach = ThresholdReport::build(
        "haplotype-achievable",
        Direction::Sufficient,
        gap2,
        ach_rhs,
        None,
        p.clone(),
    );
    let conv = ThresholdReport::build(
        "haplotype-converse",
        Direction::Necessary,
        gap2,
        conv_rhs,
        None,
        p,
    );
    Ok((ach, conv))
}

/// Order-level minimum sample complexity n ln n / hel_half_min, with the
/// implicit constant fixed to 1.
pub fn min_sample_complexity(n: usize, hel_half_min: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::BadParam(format!("n must be >= 2, got {n}")));
    }
    if hel_half_min <= 0.0 {
        return Err(Error::BadParam(format!("hel_half_min must be > 0, got {hel_half_min}")));
    }
    let nf = n as f64;
    Ok(nf * nf.ln() / hel_half_min)
}
