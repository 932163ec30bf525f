//! Closed-form model of long-run behaviour: per-receiver delivery rates,
//! buffer densities, and coding probabilities.
//!
//! Receivers are indexed `0..R` from fastest to slowest channel. The model
//! walks receivers in that order; for each receiver `l` (equivalently: mode
//! `l`, the mode that serves receivers `l..R`) it derives
//!
//! 1. `gamma_l` — probability that a slot of some faster mode carries
//!    receiver `l`'s next-needed packet anyway (a *knowledge differential*);
//! 2. the leader-transmission count distributions: `lstar` (transmissions of
//!    the current next-needed packet so far), `t` (total transmissions when
//!    the leader finally receives it), and `l` (total transmissions of a
//!    packet the leader has delivered), together with the probability `u`
//!    that a delivered packet was never overheard earlier;
//! 3. `D[a][l]` — probability that slower receiver `a` has already seen
//!    receiver `l`'s next-needed packet;
//! 4. coding probabilities over which receivers get their packet coded into
//!    a mode-`l` slot, yielding the knowledge-differential matrix `K`;
//! 5. buffer density `B_l` and the delivery rate `R_l`.
//!
//! Every count distribution here is a point mass at zero plus a geometric
//! tail, so normalization constants, tail sums, and the weighted sums the
//! model needs all have exact closed forms — no truncation anywhere.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    /// Mode `mode` neither transmits itself nor is helped by faster modes,
    /// so its stage quantities are undefined.
    #[error("mode {mode} never transmits and receives no knowledge differentials")]
    ModeUnreachable { mode: usize },
    /// A mode with positive slot share delivers at rate zero, making the
    /// buffer-density quotient undefined.
    #[error("mode {mode} has positive slot share but zero delivery rate")]
    DegenerateRates { mode: usize },
    /// Predicted buffer density reached 1: the receiver cannot keep up and
    /// the steady-state model no longer applies.
    #[error("receiver {receiver}: predicted buffer density {density} >= 1")]
    ModelBreakdown { receiver: usize, density: f64 },
}

/// Distribution over counts k = 0, 1, 2, ... with an arbitrary mass at zero
/// and a geometric tail: pmf(0) = `head`, pmf(k) = `coeff * ratio^(k-1)` for
/// k >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomDist {
    pub head: f64,
    pub coeff: f64,
    pub ratio: f64,
}

impl GeomDist {
    /// The distribution putting all mass on k = 0.
    pub fn point_mass_zero() -> GeomDist {
        GeomDist {
            head: 1.0,
            coeff: 0.0,
            ratio: 0.0,
        }
    }

    pub fn pmf(&self, k: usize) -> f64 {
        if k == 0 {
            self.head
        } else {
            self.coeff * self.ratio.powi(k as i32 - 1)
        }
    }

    /// Exact total mass `sum_k pmf(k)`.
    pub fn total(&self) -> f64 {
        if self.coeff == 0.0 {
            self.head
        } else {
            self.head + self.coeff / (1.0 - self.ratio)
        }
    }

    /// Exact `sum_k pmf(k) * x^k` for `x` in [0, 1].
    pub fn weighted_sum(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        if self.coeff == 0.0 {
            self.head
        } else {
            self.head + self.coeff * x / (1.0 - self.ratio * x)
        }
    }
}

/// Everything the model derives about one mode's leader transmissions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeaderDist {
    /// Probability that a faster mode's slot carries this receiver's
    /// next-needed packet.
    pub gamma: f64,
    /// Transmissions of the current next-needed packet so far, observed at a
    /// random slot.
    pub lstar: GeomDist,
    /// Total transmissions of a packet at the moment the mode's leader
    /// receives it; undefined (`None`) for unreachable modes.
    pub t_dist: Option<GeomDist>,
    /// Probability that the leader had not already overheard the packet from
    /// a faster mode before it became next-needed.
    pub u: f64,
    /// Total transmissions of a packet delivered by the mode's leader.
    pub l_dist: GeomDist,
}

/// Output of the full rate calculation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub mu: Vec<f64>,
    pub beta: Vec<f64>,
    pub leaders: Vec<LeaderDist>,
    /// `d[a][b]`: probability that receiver `a` has seen receiver `b`'s
    /// next-needed packet; 1 whenever `a <= b`.
    pub d: Vec<Vec<f64>>,
    /// `k[r][m]`: probability that a mode-`m` slot codes receiver `r`'s
    /// next-needed packet; 1 at `r == m`, 0 for `r < m`.
    pub k: Vec<Vec<f64>>,
    /// Predicted buffer density per receiver (`b[0] == 0`).
    pub b: Vec<f64>,
    /// Per-receiver delivery rates (packets per slot).
    pub rates: Vec<f64>,
    /// Normalized completion rates `q[r] = rates[r] / mu[r]`.
    pub q: Vec<f64>,
}

fn check_params(mu: &[f64], beta: &[f64]) {
    assert!(!mu.is_empty(), "at least one receiver");
    assert_eq!(mu.len(), beta.len(), "mu and beta must have equal length");
    assert!(mu.len() <= 32, "receiver count limited to 32");
    assert!(
        mu.iter().all(|&m| m > 0.0 && m <= 1.0),
        "channel rates must lie in (0, 1]"
    );
    assert!(
        beta.iter().all(|&b| b.is_finite() && b >= 0.0) && beta.iter().sum::<f64>() > 0.0,
        "mode shares must be nonnegative with positive total"
    );
}

/// Probability that a slot of a mode faster than `l` carries receiver `l`'s
/// next-needed packet: `sum_{m<l} beta[m] * k[l][m]`.
pub fn compute_gamma(l: usize, beta: &[f64], k: &[Vec<f64>]) -> f64 {
    (0..l).map(|m| beta[m] * k[l][m]).sum()
}

fn stage_reachable(mu_l: f64, beta_l: f64, gamma_l: f64) -> bool {
    beta_l + mu_l * gamma_l > 0.0
}

/// Distribution of how many mode-`l` leader transmissions the current
/// next-needed packet has had so far, seen at a random slot. Geometric with
/// ratio `rho = (1-mu_l) * beta_l / (beta_l + mu_l * gamma_l)`.
pub fn compute_lstar(
    mode: usize,
    mu_l: f64,
    beta_l: f64,
    gamma_l: f64,
) -> Result<GeomDist, AnalysisError> {
    if !stage_reachable(mu_l, beta_l, gamma_l) {
        return Err(AnalysisError::ModeUnreachable { mode });
    }
    let denom = beta_l + mu_l * gamma_l;
    let scale = mu_l * (beta_l + gamma_l) / denom;
    let rho = (1.0 - mu_l) * beta_l / denom;
    Ok(GeomDist {
        head: scale,
        coeff: scale * rho,
        ratio: rho,
    })
}

/// Distribution of the total number of mode-`l` leader transmissions a
/// packet has had when the leader finally receives it. Mass at zero covers
/// packets overheard from knowledge differentials before ever leading.
pub fn compute_t(
    mode: usize,
    mu_l: f64,
    beta_l: f64,
    gamma_l: f64,
) -> Result<GeomDist, AnalysisError> {
    if !stage_reachable(mu_l, beta_l, gamma_l) {
        return Err(AnalysisError::ModeUnreachable { mode });
    }
    let denom = beta_l + mu_l * gamma_l;
    let rho = (1.0 - mu_l) * beta_l / denom;
    Ok(GeomDist {
        head: mu_l * gamma_l / denom,
        coeff: mu_l * beta_l * (beta_l + gamma_l) / (denom * denom),
        ratio: rho,
    })
}

/// Probability that a packet becoming receiver `l`'s next-needed was never
/// overheard from the faster modes' leader transmissions:
/// `prod_{i<l} sum_k l_dists[i](k) * (1-mu_l)^k`.
pub fn compute_u(l: usize, l_dists: &[GeomDist], mu_l: f64) -> f64 {
    debug_assert!(l_dists.len() >= l);
    let miss = 1.0 - mu_l;
    (0..l).map(|i| l_dists[i].weighted_sum(miss)).product()
}

/// Distribution of the total mode-`l` leader-transmission count of a packet
/// the leader has delivered: packets overheard in advance contribute the
/// extra mass `1 - u` at zero.
pub fn compute_l(u: f64, t: &GeomDist) -> GeomDist {
    GeomDist {
        head: 1.0 - u + u * t.head,
        coeff: u * t.coeff,
        ratio: t.ratio,
    }
}

/// Probability that receiver `a` has already seen receiver `b`'s next-needed
/// packet (1 trivially when `a <= b`). Receiver `a` misses the packet only
/// by missing all its leader transmissions, both the `lstar_b` of them so
/// far in mode `b` and the full counts from every faster mode.
pub fn compute_d(a: usize, b: usize, leaders: &[LeaderDist], mu_a: f64) -> f64 {
    if a <= b {
        return 1.0;
    }
    let miss = 1.0 - mu_a;
    let unseen: f64 = leaders[b].lstar.weighted_sum(miss)
        * (0..b)
            .map(|l| leaders[l].l_dist.weighted_sum(miss))
            .product::<f64>();
    1.0 - unseen
}

/// Joint distribution over which of receivers `mode..=r` get their packet
/// coded into a mode-`mode` slot, for every `r` up to `up_to`.
///
/// Prefixes are bitmasks over receiver indices. The base case codes exactly
/// the mode's leader; extending a prefix to receiver `j` codes `j`'s packet
/// iff `j` has seen every so-far-coded packet, which happens with
/// probability `prod_{b in prefix} d[j][b]`.
#[derive(Debug, Clone)]
pub struct CodingProbs {
    mode: usize,
    levels: Vec<Vec<(u32, f64)>>,
}

impl CodingProbs {
    pub fn mode(&self) -> usize {
        self.mode
    }

    /// Largest receiver index the prefixes cover.
    pub fn max_receiver(&self) -> usize {
        self.mode + self.levels.len() - 1
    }

    /// All `(bitmask, probability)` prefixes over receivers `0..=r`.
    pub fn prefixes(&self, r: usize) -> &[(u32, f64)] {
        &self.levels[r - self.mode]
    }

    /// Total probability mass at level `r` (should be exactly 1).
    pub fn total(&self, r: usize) -> f64 {
        self.prefixes(r).iter().map(|&(_, p)| p).sum()
    }

    /// Probability that receiver `r`'s bit is set at level `r`.
    pub fn marginal(&self, r: usize) -> f64 {
        self.prefixes(r)
            .iter()
            .filter(|&&(mask, _)| mask & (1 << r) != 0)
            .map(|&(_, p)| p)
            .sum()
    }
}

pub fn compute_coding_probs(mode: usize, d: &[Vec<f64>], up_to: usize) -> CodingProbs {
    assert!(mode <= up_to && up_to < 32);
    let mut levels = vec![vec![(1u32 << mode, 1.0)]];
    for j in mode + 1..=up_to {
        let prev = levels.last().expect("base level present");
        let mut next = Vec::with_capacity(prev.len() * 2);
        for &(mask, p) in prev {
            let mut p1 = 1.0;
            for b in mode..j {
                if mask & (1 << b) != 0 {
                    p1 *= d[j][b];
                }
            }
            if p * p1 > 0.0 {
                next.push((mask | (1 << j), p * p1));
            }
            if p * (1.0 - p1) > 0.0 {
                next.push((mask, p * (1.0 - p1)));
            }
        }
        levels.push(next);
    }
    CodingProbs { mode, levels }
}

/// Probability that a mode slot codes receiver `r`'s next-needed packet: the
/// bit-`r` marginal of the coding prefixes.
pub fn compute_k(r: usize, probs: &CodingProbs) -> f64 {
    if r < probs.mode() {
        return 0.0;
    }
    probs.marginal(r)
}

/// Predicted buffer density of receiver `r`: how full the span between `r`'s
/// delivery frontier and the next faster receiver's runs. Each faster mode
/// `m` contributes the packets it sends that are *not* knowledge
/// differentials for `r`, weighted by how long mode-`m` packets stay ahead
/// of `r`'s frontier (the rate quotient).
pub fn compute_b(
    r: usize,
    mu_r: f64,
    beta: &[f64],
    k_row: &[f64],
    rates: &[f64],
) -> Result<f64, AnalysisError> {
    let mut sum = 0.0;
    for m in 0..r {
        if beta[m] == 0.0 {
            continue; // mode never transmits; contributes nothing
        }
        if rates[m] == 0.0 {
            return Err(AnalysisError::DegenerateRates { mode: m });
        }
        sum += beta[m] * (1.0 - k_row[m]) / rates[m];
    }
    Ok(mu_r * sum)
}

/// Long-run delivery rate of receiver `r`: packets arrive from every mode
/// `m <= r` that codes `r`'s packet, inflated by re-deliveries of buffered
/// packets as the frontier advances through the density region.
pub fn compute_r(
    r: usize,
    mu_r: f64,
    beta: &[f64],
    k_row: &[f64],
    b_r: f64,
) -> Result<f64, AnalysisError> {
    if b_r >= 1.0 {
        return Err(AnalysisError::ModelBreakdown {
            receiver: r,
            density: b_r,
        });
    }
    let sum: f64 = (0..=r).map(|m| beta[m] * k_row[m]).sum();
    Ok(mu_r * sum / (1.0 - b_r))
}

/// Runs the full pipeline for channel rates `mu` (fastest first) and mode
/// shares `beta`.
///
/// `beta` need not sum to 1: scaling `beta` scales every rate linearly and
/// leaves `k`, `b`, and `q`-ratios untouched, which the fairness iteration
/// exploits. Modes with `beta[l] == 0` that also receive no knowledge
/// differentials are treated as inert (their count distributions collapse to
/// a point mass at zero) rather than an error; errors surface only when an
/// impossible quotient is actually demanded.
pub fn run_rate_calc(mu: &[f64], beta: &[f64]) -> Result<AnalysisReport, AnalysisError> {
    check_params(mu, beta);
    let n = mu.len();

    let mut leaders: Vec<LeaderDist> = Vec::with_capacity(n);
    let mut d = vec![vec![1.0; n]; n];
    let mut k = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    let mut rates = vec![0.0; n];

    for m in 0..n {
        let l_dists: Vec<GeomDist> = leaders.iter().map(|ld| ld.l_dist).collect();
        let gamma = compute_gamma(m, beta, &k);
        let u = compute_u(m, &l_dists, mu[m]);
        let stage = if stage_reachable(mu[m], beta[m], gamma) {
            let lstar = compute_lstar(m, mu[m], beta[m], gamma).expect("reachable");
            let t = compute_t(m, mu[m], beta[m], gamma).expect("reachable");
            LeaderDist {
                gamma,
                lstar,
                t_dist: Some(t),
                u,
                l_dist: compute_l(u, &t),
            }
        } else {
            // The mode never transmits: its leader counts are identically
            // zero and it never blocks anything downstream.
            LeaderDist {
                gamma,
                lstar: GeomDist::point_mass_zero(),
                t_dist: None,
                u,
                l_dist: GeomDist::point_mass_zero(),
            }
        };
        leaders.push(stage);

        for a in m + 1..n {
            d[a][m] = compute_d(a, m, &leaders, mu[a]);
        }

        // Coding probabilities for every mode up to the current stage. All
        // entries below row `m` were already fixed by earlier stages; the
        // recomputation must agree with them.
        for mode in 0..=m {
            let probs = compute_coding_probs(mode, &d, m);
            for r in mode..=m {
                let value = compute_k(r, &probs);
                if r < m {
                    debug_assert!(
                        (k[r][mode] - value).abs() < 1e-9,
                        "kdiff entry ({r},{mode}) drifted on recomputation"
                    );
                }
                k[r][mode] = value;
            }
        }

        b[m] = compute_b(m, mu[m], beta, &k[m], &rates)?;
        rates[m] = compute_r(m, mu[m], beta, &k[m], b[m])?;
    }

    let q = (0..n).map(|r| rates[r] / mu[r]).collect();
    Ok(AnalysisReport {
        mu: mu.to_vec(),
        beta: beta.to_vec(),
        leaders,
        d,
        k,
        b,
        rates,
        q,
    })
}

/// Dependent vs. independent models of two receivers both having seen the
/// lead receiver's next-needed packet (single-mode broadcast, receiver 0
/// leading). Under the dependent (exact) model the expected number of
/// transmissions until receivers `a` and `b` have both seen the packet
/// shares the misses; assuming independence overstates receiver `a`'s
/// completion probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationComparison {
    /// Slower receiver under study (0-based).
    pub a: usize,
    /// Faster non-leading receiver it is paired with (0-based).
    pub b: usize,
    /// P(a has the packet | joint completion with b), dependent model.
    pub dependent: f64,
    /// Same probability under the independence assumption.
    pub independent: f64,
    /// `independent / dependent - 1`.
    pub relative_gap: f64,
}

pub fn compare_correlation_models(mu: &[f64], a: usize, b: usize) -> CorrelationComparison {
    assert!(b >= 1 && b < a && a < mu.len(), "need 0 < b < a < R");
    let miss = |i: usize| 1.0 - mu[i];
    let dependent = mu[a] / (1.0 - miss(0) * miss(b) * miss(a));
    let independent = mu[a] / (1.0 - miss(0) * miss(a));
    CorrelationComparison {
        a,
        b,
        dependent,
        independent,
        relative_gap: independent / dependent - 1.0,
    }
}

/// Scans all valid `(a, b)` pairs and returns the comparison with the
/// largest relative gap; `None` when fewer than three receivers.
pub fn max_correlation_gap(mu: &[f64]) -> Option<CorrelationComparison> {
    let mut best: Option<CorrelationComparison> = None;
    for a in 2..mu.len() {
        for b in 1..a {
            let cmp = compare_correlation_models(mu, a, b);
            if best.is_none_or(|cur| cmp.relative_gap > cur.relative_gap) {
                best = Some(cmp);
            }
        }
    }
    best
}
