//! Shannon entropies in nats: discrete `-sum p ln p` over bin probabilities and
//! continuous `-\int rho ln rho`.

use serde::{Deserialize, Serialize};

use crate::binning::{bin_probabilities, BinGrid, Convention, DiscreteDistribution, Window};
use crate::density::{integrate_with, Density, Domain};
use crate::error::Result;
use crate::quad::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    Continuous,
    DiscreteFull,
    DiscreteFinite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub kind: EntropyKind,
    /// Upper estimate, in nats, of what the omitted tail could still contribute.
    /// Diagnostic only; zero for finite windows, whose sum is complete by definition.
    pub truncation_bound: f64,
}

/// `-p ln p` with `0 ln 0 = 0`.
pub fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Indices `0, -1, 1, -2, 2, ...` relative to bin 0, clipped to the stored range.
fn ascending_abs_k(d: &DiscreteDistribution) -> impl Iterator<Item = i64> + '_ {
    let reach = d.k_min().unsigned_abs().max(d.k_max().unsigned_abs()) as i64;
    (0..=reach)
        .flat_map(|a| if a == 0 { vec![0] } else { vec![-a, a] })
        .filter(move |k| *k >= d.k_min() && *k <= d.k_max())
}

/// `-sum_k p_k ln p_k`, summed in order of increasing `|k|`.
pub fn discrete_entropy(dist: &DiscreteDistribution) -> EntropyValue {
    let value = ascending_abs_k(dist).map(|k| plogp(dist.prob(k))).sum::<f64>();
    let (kind, truncation_bound) = match dist.window() {
        Window::Finite(m) => (EntropyKind::DiscreteFinite(m), 0.0),
        Window::FullLine => {
            let t = dist.tail_mass();
            let bins = dist.probs().len().max(1) as f64;
            (EntropyKind::DiscreteFull, plogp(t) + t * bins.ln())
        }
    };
    EntropyValue {
        value,
        kind,
        truncation_bound,
    }
}

/// `-\int_domain rho ln rho`, with the integrand taken as zero where `rho` vanishes.
pub fn continuous_entropy<D: Density + ?Sized>(density: &D, domain: &Domain) -> Result<f64> {
    let tol = Tolerance::current();
    Ok(integrate_with(density, domain, |_, r| plogp(r), &tol)?.value)
}

/// Discrete entropy of a full-line binning at a (typically very large) bin width.
///
/// With the border convention a state symmetric about the origin keeps `ln 2` no matter
/// how coarse the bins; with the midpoint convention the entropy goes to zero.
pub fn large_delta_limit_probe<D: Density + ?Sized>(
    density: &D,
    convention: Convention,
    delta: f64,
) -> Result<EntropyValue> {
    let grid = BinGrid::full_line(delta, convention)?;
    Ok(discrete_entropy(&bin_probabilities(density, &grid)?))
}
