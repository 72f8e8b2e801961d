//! Finite-alphabet f-divergences and the channel-level minimum-divergence
//! profile.
//!
//! All divergences are computed in nats on 64-bit floats. The conventions
//! `0 * ln 0 = 0` and `0^alpha = 0` are applied pointwise. A KL evaluation
//! where `p(y) > 0` but `q(y) = 0` is an error rather than infinity, so
//! callers must handle support mismatch explicitly.

use crate::channel::ChannelFamily;
use crate::error::{Error, Result};

/// Tolerance on total mass when constructing a [`Pmf`].
pub const PMF_MASS_TOL: f64 = 1e-9;

/// A finite probability mass function over an indexed output alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        if let Some(&bad) = probs.iter().find(|&&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf(format!("negative or non-finite entry {bad}")));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > PMF_MASS_TOL {
            return Err(Error::InvalidPmf(format!("total mass {mass} outside 1 +- {PMF_MASS_TOL}")));
        }
        Ok(Pmf { probs })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("Bernoulli parameter {p} outside [0,1]")));
        }
        // Alphabet is {0, 1} with P(1) = p.
        Pmf::new(vec![1.0 - p, p])
    }

    /// Point mass at `symbol` over an alphabet of the given size.
    pub fn point(alphabet: usize, symbol: usize) -> Result<Self> {
        if symbol >= alphabet {
            return Err(Error::InvalidPmf(format!("symbol {symbol} outside alphabet {alphabet}")));
        }
        let mut probs = vec![0.0; alphabet];
        probs[symbol] = 1.0;
        Pmf::new(probs)
    }

    pub fn uniform(alphabet: usize) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        Pmf::new(vec![1.0 / alphabet as f64; alphabet])
    }

    /// Binomial(trials, p) over the alphabet {0, ..., trials}.
    pub fn binomial(trials: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidPmf(format!("Binomial parameter {p} outside [0,1]")));
        }
        let mut probs = Vec::with_capacity(trials + 1);
        // Multiplicative recurrence on ln C(L,k) keeps small-L pmfs exact
        // enough; trials stay modest (read counts), so no Stirling needed.
        let mut coeff = 1.0f64;
        for k in 0..=trials {
            if k > 0 {
                coeff = coeff * (trials - k + 1) as f64 / k as f64;
            }
            probs.push(coeff * p.powi(k as i32) * (1.0 - p).powi((trials - k) as i32));
        }
        let mass: f64 = probs.iter().sum();
        for q in &mut probs {
            *q /= mass;
        }
        Pmf::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// n-fold product measure over the alphabet of size `len()^n`.
    /// Symbol index is little-endian in the factor symbols.
    pub fn product(&self, copies: usize, budget: u128) -> Result<Pmf> {
        let size = (self.len() as u128).checked_pow(copies as u32).unwrap_or(u128::MAX);
        if size > budget {
            return Err(Error::AlphabetTooLarge { size, budget });
        }
        let mut probs = vec![1.0];
        for _ in 0..copies {
            let mut next = Vec::with_capacity(probs.len() * self.len());
            for &factor in &self.probs {
                for &tail in &probs {
                    next.push(tail * factor);
                }
            }
            probs = next;
        }
        // Renormalize: rounding drift compounds across factors.
        let mass: f64 = probs.iter().sum();
        for q in &mut probs {
            *q /= mass;
        }
        Pmf::new(probs)
    }
}

fn check_same_alphabet(p: &Pmf, q: &Pmf) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// KL divergence of q from p in nats: sum p(y) ln(p(y)/q(y)).
pub fn kl(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_same_alphabet(p, q)?;
    let mut acc = 0.0;
    for (y, (&pp, &qq)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pp > 0.0 {
            if qq == 0.0 {
                return Err(Error::AbsoluteContinuityViolated { symbol: y });
            }
            acc += pp * (pp / qq).ln();
        }
    }
    Ok(acc)
}

/// KL with support mismatch mapped to +inf instead of an error; used when
/// minimizing over channel input pairs where some pairs may be singular.
fn kl_or_inf(p: &Pmf, q: &Pmf) -> f64 {
    match kl(p, q) {
        Ok(v) => v,
        Err(_) => f64::INFINITY,
    }
}

/// Hellinger divergence of order alpha in (0,1):
/// (1/(1-alpha)) [1 - sum p^alpha q^(1-alpha)].
pub fn hellinger_alpha(p: &Pmf, q: &Pmf, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadOrder(alpha));
    }
    check_same_alphabet(p, q)?;
    Ok((1.0 - bhattacharyya_alpha(p, q, alpha)) / (1.0 - alpha))
}

/// sum_y p(y)^alpha q(y)^(1-alpha), the integral shared by the Hellinger and
/// Renyi definitions. With 0^alpha = 0.
fn bhattacharyya_alpha(p: &Pmf, q: &Pmf, alpha: f64) -> f64 {
    p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&pp, &qq)| {
            if pp == 0.0 || qq == 0.0 {
                0.0
            } else if alpha == 0.5 {
                (pp * qq).sqrt()
            } else {
                pp.powf(alpha) * qq.powf(1.0 - alpha)
            }
        })
        .sum()
}

/// chi-square divergence: sum (p/q - 1)^2 q over the support of q.
pub fn chi_square(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_same_alphabet(p, q)?;
    let mut acc = 0.0;
    for (y, (&pp, &qq)) in p.probs().iter().zip(q.probs()).enumerate() {
        if qq == 0.0 {
            if pp > 0.0 {
                return Err(Error::AbsoluteContinuityViolated { symbol: y });
            }
        } else {
            let r = pp / qq - 1.0;
            acc += r * r * qq;
        }
    }
    Ok(acc)
}

/// Renyi divergence of order alpha in (0,1), computed through the Hellinger
/// identity -(1/(1-alpha)) ln(1 - (1-alpha) Hel_alpha). Returns +inf for
/// disjoint supports.
pub fn renyi(p: &Pmf, q: &Pmf, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadOrder(alpha));
    }
    check_same_alphabet(p, q)?;
    let integral = bhattacharyya_alpha(p, q, alpha);
    if integral <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-integral.ln() / (1.0 - alpha))
}

/// Per-inequality outcome of the KL/Hellinger sandwich (likelihood-ratio
/// bound R, both directions, and the tighter variant available for R <= 4.5).
#[derive(Debug, Clone, PartialEq)]
pub struct Fact1Bounds {
    pub r: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub small_r_ok: bool,
}

/// Evaluates max{2 - 0.5 ln R, 1} Hel_{1/2} <= KL <= (2 + ln R) Hel_{1/2},
/// plus the 0.4 ln R variant when R <= 4.5. Requires mutual absolute
/// continuity so R is finite.
pub fn fact1_bounds(p: &Pmf, q: &Pmf) -> Result<Fact1Bounds> {
    check_same_alphabet(p, q)?;
    let mut r: f64 = 1.0;
    for (y, (&pp, &qq)) in p.probs().iter().zip(q.probs()).enumerate() {
        match (pp > 0.0, qq > 0.0) {
            (true, false) | (false, true) => {
                return Err(Error::AbsoluteContinuityViolated { symbol: y })
            }
            (true, true) => r = r.max(pp / qq).max(qq / pp),
            (false, false) => {}
        }
    }
    let hel = hellinger_alpha(p, q, 0.5)?;
    let kl_pq = kl(p, q)?;
    const SLACK: f64 = 1e-12;
    let lower_ok = (2.0 - 0.5 * r.ln()).max(1.0) * hel <= kl_pq + SLACK;
    let upper_ok = kl_pq <= (2.0 + r.ln()) * hel + SLACK;
    let small_r_ok = if r <= 4.5 {
        (2.0 - 0.4 * r.ln()) * hel <= kl_pq + SLACK && kl_pq <= (2.0 + 0.4 * r.ln()) * hel + SLACK
    } else {
        true // variant does not apply
    };
    Ok(Fact1Bounds { r, lower_ok, upper_ok, small_r_ok })
}

/// Equality check of 1 - (1-alpha) Hel_alpha over an explicit n-fold product
/// measure against the single-letter value raised to the n-th power.
#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// Budget on the explicit product-alphabet size used by [`decoupling_check`].
pub const PRODUCT_ALPHABET_BUDGET: u128 = 1 << 20;

pub fn decoupling_check(p: &Pmf, q: &Pmf, alpha: f64, n_copies: usize) -> Result<DecouplingCheck> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadOrder(alpha));
    }
    if n_copies == 0 {
        return Err(Error::BadParam("n_copies must be >= 1".into()));
    }
    check_same_alphabet(p, q)?;
    let pn = p.product(n_copies, PRODUCT_ALPHABET_BUDGET)?;
    let qn = q.product(n_copies, PRODUCT_ALPHABET_BUDGET)?;
    let lhs = 1.0 - (1.0 - alpha) * hellinger_alpha(&pn, &qn, alpha)?;
    let rhs = (1.0 - (1.0 - alpha) * hellinger_alpha(p, q, alpha)?).powi(n_copies as i32);
    Ok(DecouplingCheck { lhs, rhs })
}

/// Minimum divergences over all ordered input pairs of a channel family,
/// together with the achievability sup-term and the near-minimal pair counts.
#[derive(Debug, Clone)]
pub struct DivergenceProfile {
    pub kl_min: f64,
    /// (alpha, min over l != k of Hel_alpha(P_l || P_k)) for each stored order.
    pub hel_min: Vec<(f64, f64)>,
    /// (alpha, min over l != k of D_alpha(P_l || P_k)).
    pub renyi_min: Vec<(f64, f64)>,
    /// sup over alpha in (0,1) of (1-alpha) Hel_alpha^min.
    pub sup_alpha_term: f64,
    pub argmax_alpha: f64,
    /// (zeta, m^kl(zeta)) for each requested zeta.
    pub m_kl: Vec<(f64, usize)>,
}

impl DivergenceProfile {
    /// Minimum squared Hellinger distance (order 1/2), always stored.
    pub fn hel_half_min(&self) -> f64 {
        self.hel_at(0.5).expect("order 1/2 is always stored")
    }

    pub fn hel_at(&self, alpha: f64) -> Option<f64> {
        self.hel_min
            .iter()
            .find(|(a, _)| (*a - alpha).abs() < 1e-12)
            .map(|&(_, v)| v)
    }

    pub fn m_kl_at(&self, zeta: f64) -> Option<usize> {
        self.m_kl
            .iter()
            .find(|(z, _)| (*z - zeta).abs() < 1e-12)
            .map(|&(_, v)| v)
    }
}

/// Default alpha grid {0.01, 0.02, ..., 0.99} for the sup-term search.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

fn hel_min_over_pairs(channel: &ChannelFamily, alpha: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for l in 0..channel.m() {
        for k in 0..channel.m() {
            if l != k {
                best = best.min(hellinger_alpha(channel.row(l), channel.row(k), alpha)?);
            }
        }
    }
    Ok(best)
}

/// m^kl(zeta): the largest, over reference inputs l, count of inputs i != l
/// with KL(P_i || P_l) <= (1 + zeta) KL^min.
pub fn m_kl(channel: &ChannelFamily, zeta: f64) -> Result<usize> {
    if zeta < 0.0 {
        return Err(Error::BadParam(format!("zeta must be >= 0, got {zeta}")));
    }
    let m = channel.m();
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    let mut kl_min = f64::INFINITY;
    let mut table = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for l in 0..m {
            if i != l {
                let v = kl_or_inf(channel.row(i), channel.row(l));
                table[i][l] = v;
                kl_min = kl_min.min(v);
            }
        }
    }
    let cutoff = (1.0 + zeta) * kl_min;
    let mut best = 0;
    for l in 0..m {
        let count = (0..m).filter(|&i| i != l && table[i][l] <= cutoff).count();
        best = best.max(count);
    }
    Ok(best)
}

/// Computes the full minimum-divergence profile of a channel family.
///
/// `alphas` are the Hellinger/Renyi orders to store (order 1/2 is always
/// included) and also serve as the search grid for the sup-term, which is
/// then sharpened by golden-section refinement around the grid argmax to a
/// tolerance of 1e-6 in alpha.
pub fn divergence_profile(
    channel: &ChannelFamily,
    alphas: &[f64],
    zetas: &[f64],
) -> Result<DivergenceProfile> {
    let m = channel.m();
    if m < 2 {
        return Err(Error::DegenerateChannel(m));
    }
    let mut orders: Vec<f64> = alphas.to_vec();
    if !orders.iter().any(|&a| (a - 0.5).abs() < 1e-12) {
        orders.push(0.5);
    }
    orders.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &a in &orders {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::BadOrder(a));
        }
    }

    let mut kl_min = f64::INFINITY;
    for l in 0..m {
        for k in 0..m {
            if l != k {
                kl_min = kl_min.min(kl_or_inf(channel.row(l), channel.row(k)));
            }
        }
    }

    let mut hel_min = Vec::with_capacity(orders.len());
    let mut renyi_min = Vec::with_capacity(orders.len());
    for &a in &orders {
        hel_min.push((a, hel_min_over_pairs(channel, a)?));
        let mut best = f64::INFINITY;
        for l in 0..m {
            for k in 0..m {
                if l != k {
                    best = best.min(renyi(channel.row(l), channel.row(k), a)?);
                }
            }
        }
        renyi_min.push((a, best));
    }

    // sup_{0<alpha<1} (1-alpha) Hel_alpha^min: grid scan then golden-section
    // refinement on the bracketing interval.
    let objective = |a: f64| -> f64 {
        hel_min_over_pairs(channel, a).map(|h| (1.0 - a) * h).unwrap_or(f64::NEG_INFINITY)
    };
    let grid = if alphas.is_empty() { default_alpha_grid() } else { orders.clone() };
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &a) in grid.iter().enumerate() {
        let v = objective(a);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { grid[0] * 0.5 } else { grid[best_i - 1] };
    let hi = if best_i + 1 == grid.len() { 0.5 * (grid[best_i] + 1.0) } else { grid[best_i + 1] };
    let (argmax_alpha, refined) = golden_section_max(objective, lo, hi, 1e-6);
    let (sup_alpha_term, argmax_alpha) =
        if refined >= best_v { (refined, argmax_alpha) } else { (best_v, grid[best_i]) };

    let mut m_kl_table = Vec::with_capacity(zetas.len());
    for &z in zetas {
        m_kl_table.push((z, m_kl(channel, z)?));
    }

    Ok(DivergenceProfile { kl_min, hel_min, renyi_min, sup_alpha_term, argmax_alpha, m_kl: m_kl_table })
}

/// Golden-section search for the maximum of a unimodal-enough objective on
/// [lo, hi]; returns (argmax, max).
fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{outlier_channel, sbm_channel, ChannelFamily};

    fn bern(p: f64) -> Pmf {
        Pmf::bernoulli(p).unwrap()
    }

    #[test]
    fn kl_identical_measures_is_zero() {
        assert_eq!(kl(&bern(0.3), &bern(0.3)).unwrap(), 0.0);
    }

    #[test]
    fn kl_hand_value() {
        // p = Bern(0.5), q = Bern(0.25): 0.5 ln 2 + 0.5 ln(2/3)
        let expect = 0.5 * 2.0f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        let got = kl(&bern(0.5), &bern(0.25)).unwrap();
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn kl_support_mismatch_errors() {
        let delta0 = Pmf::point(2, 0).unwrap();
        assert!(matches!(
            kl(&bern(0.5), &delta0),
            Err(Error::AbsoluteContinuityViolated { symbol: 1 })
        ));
    }

    #[test]
    fn hellinger_zero_and_disjoint() {
        let p = bern(0.37);
        assert!(hellinger_alpha(&p, &p, 0.3).unwrap().abs() < 1e-15);
        let d0 = Pmf::point(2, 0).unwrap();
        let d1 = Pmf::point(2, 1).unwrap();
        assert!((hellinger_alpha(&d0, &d1, 0.5).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hellinger_half_hand_value() {
        // Bern(0.75) vs Bern(0.25): 2 - 2 (sqrt(0.75*0.25) + sqrt(0.25*0.75))
        let expect = 2.0 - 2.0 * (2.0 * (0.75f64 * 0.25).sqrt());
        let got = hellinger_alpha(&bern(0.75), &bern(0.25), 0.5).unwrap();
        assert!((got - expect).abs() < 1e-15);
    }

    #[test]
    fn hellinger_rejects_bad_order() {
        assert!(matches!(hellinger_alpha(&bern(0.5), &bern(0.2), 1.0), Err(Error::BadOrder(_))));
        assert!(matches!(hellinger_alpha(&bern(0.5), &bern(0.2), 0.0), Err(Error::BadOrder(_))));
    }

    #[test]
    fn chi_square_values() {
        let p = bern(0.4);
        assert!(chi_square(&p, &p).unwrap().abs() < 1e-15);
        // Bern(0.5) vs Bern(0.25): (p-q)^2 / (q (1-q)) = 1/3
        let got = chi_square(&bern(0.5), &bern(0.25)).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-15);
        // Bern(1.0) vs Bern(0.5): direct evaluation gives 1
        let got = chi_square(&bern(1.0), &bern(0.5)).unwrap();
        assert!((got - 1.0).abs() < 1e-15);
    }

    #[test]
    fn renyi_values() {
        let p = bern(0.6);
        assert!(renyi(&p, &p, 0.5).unwrap().abs() < 1e-15);
        let d0 = Pmf::point(2, 0).unwrap();
        let d1 = Pmf::point(2, 1).unwrap();
        assert!(renyi(&d0, &d1, 0.5).unwrap().is_infinite());
        // Bern(0.75) vs Bern(0.25), alpha = 1/2: -2 ln(2 sqrt(0.1875))
        let expect = -2.0 * (2.0 * 0.1875f64.sqrt()).ln();
        let got = renyi(&bern(0.75), &bern(0.25), 0.5).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn renyi_identity_matches_direct_integral() {
        // Direct evaluation of the Renyi definition as an independent route.
        let cases = [(0.7, 0.2, 0.3), (0.9, 0.55, 0.5), (0.01, 0.6, 0.85)];
        for (pp, qq, a) in cases {
            let p = bern(pp);
            let q = bern(qq);
            let direct = {
                let integral: f64 = p
                    .probs()
                    .iter()
                    .zip(q.probs())
                    .map(|(&x, &y)| x.powf(a) * y.powf(1.0 - a))
                    .sum();
                -integral.ln() / (1.0 - a)
            };
            let via_hel = {
                let h = hellinger_alpha(&p, &q, a).unwrap();
                -(1.0 - (1.0 - a) * h).ln() / (1.0 - a)
            };
            assert!((renyi(&p, &q, a).unwrap() - direct).abs() < 1e-12);
            assert!((via_hel - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn fact1_identical_measures() {
        let b = fact1_bounds(&bern(0.5), &bern(0.5)).unwrap();
        assert_eq!(b.r, 1.0);
        assert!(b.lower_ok && b.upper_ok && b.small_r_ok);
    }

    #[test]
    fn fact1_close_bernoulli_pair() {
        let b = fact1_bounds(&bern(0.5), &bern(0.4)).unwrap();
        assert!((b.r - 1.25).abs() < 1e-12);
        assert!(b.lower_ok && b.upper_ok && b.small_r_ok);
    }

    #[test]
    fn decoupling_single_copy_is_exact() {
        let c = decoupling_check(&bern(0.7), &bern(0.3), 0.5, 1).unwrap();
        assert_eq!(c.lhs, c.rhs);
    }

    #[test]
    fn decoupling_three_copies() {
        let c = decoupling_check(&bern(0.7), &bern(0.3), 0.5, 3).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-12);
    }

    #[test]
    fn decoupling_equal_measures_is_one() {
        let c = decoupling_check(&bern(0.4), &bern(0.4), 0.3, 4).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-9 && (c.rhs - 1.0).abs() < 1e-9);
    }

    #[test]
    fn profile_outlier_kl_min_closed_form() {
        // Closed form p ln(1 + pM/(1-p)) at (p_true, M) = (0.5, 2): 0.5 ln 3.
        let ch = outlier_channel(2, 0.5).unwrap();
        let prof = divergence_profile(&ch, &[0.5], &[0.0]).unwrap();
        assert!((prof.kl_min - 0.5 * 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn profile_uniform_channel_all_zero() {
        let ch = outlier_channel(4, 0.0).unwrap();
        let prof = divergence_profile(&ch, &[0.3, 0.5], &[0.0]).unwrap();
        assert_eq!(prof.kl_min, 0.0);
        assert!(prof.hel_half_min().abs() < 1e-15);
        assert!(prof.sup_alpha_term.abs() < 1e-12);
    }

    #[test]
    fn profile_sbm_hel_half_display() {
        let (a, b, n) = (4.0f64, 1.0f64, 100.0f64);
        let pa = a * n.ln() / n;
        let pb = n.ln() / n;
        let expect = (pa.sqrt() - pb.sqrt()).powi(2)
            + ((1.0 - pa).sqrt() - (1.0 - pb).sqrt()).powi(2);
        let ch = sbm_channel(a, b, 100).unwrap();
        let prof = divergence_profile(&ch, &[0.5], &[]).unwrap();
        assert!((prof.hel_half_min() - expect).abs() < 1e-12);
    }

    #[test]
    fn m_kl_outlier_is_m_minus_one() {
        for m in [2usize, 3, 5, 17] {
            let ch = outlier_channel(m, 0.4).unwrap();
            for zeta in [0.0, 0.5, 3.0] {
                assert_eq!(m_kl(&ch, zeta).unwrap(), m - 1);
            }
        }
    }

    #[test]
    fn m_kl_counts_exact_minimizers() {
        // Rows at distinct spreads: only one pair attains the minimum.
        let rows = vec![bern(0.5), bern(0.45), bern(0.2)];
        let ch = ChannelFamily::new(rows, "spread").unwrap();
        // Brute-force oracle over all ordered pairs.
        let mut kls = vec![];
        for i in 0..3 {
            for l in 0..3 {
                if i != l {
                    kls.push(((i, l), kl(ch.row(i), ch.row(l)).unwrap()));
                }
            }
        }
        let min = kls.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
        let mut expect = 0;
        for l in 0..3 {
            let c = kls.iter().filter(|&&((i, ll), v)| ll == l && i != l && v <= min).count();
            expect = expect.max(c);
        }
        assert_eq!(m_kl(&ch, 0.0).unwrap(), expect);
    }

    #[test]
    fn profile_rejects_degenerate_channel() {
        let ch = ChannelFamily::new(vec![bern(0.5)], "one-row");
        assert!(ch.is_err());
    }
}
