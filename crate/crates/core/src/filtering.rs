//! Diagonal local filters `diag(ε, 1)` and their action on network links.
//!
//! Because every filter acts on a single qubit, the filtered network state
//! factorizes into normalized per-link states, and the overall success
//! probability is the product of the per-link traces.

use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix4;
use crate::error::{check_range, Error, Result};
use crate::matrix::ComplexMatrix;

/// Success probabilities at or below this are treated as an impossible
/// post-selection.
pub const MIN_SUCCESS_PROBABILITY: f64 = 1e-12;

/// `ε|0⟩⟨0| + |1⟩⟨1|`
pub fn filter_operator(eps: f64) -> Result<ComplexMatrix> {
    let eps = check_range("eps", eps, 0.0, 1.0)?;
    Ok(ComplexMatrix::from_real_diagonal(&[eps, 1.0]))
}

/// Filter parameters for the two qubits of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkFilter {
    eps_left: f64,
    eps_right: f64,
}

impl LinkFilter {
    pub fn new(eps_left: f64, eps_right: f64) -> Result<Self> {
        Ok(Self {
            eps_left: check_range("eps_left", eps_left, 0.0, 1.0)?,
            eps_right: check_range("eps_right", eps_right, 0.0, 1.0)?,
        })
    }

    pub const IDENTITY: LinkFilter = LinkFilter {
        eps_left: 1.0,
        eps_right: 1.0,
    };

    pub fn eps_left(&self) -> f64 {
        self.eps_left
    }

    pub fn eps_right(&self) -> f64 {
        self.eps_right
    }

    pub fn is_identity(&self) -> bool {
        self.eps_left == 1.0 && self.eps_right == 1.0
    }

    /// `F_L ⊗ F_R`
    pub fn operator(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[self.eps_left, 1.0])
            .kron(&ComplexMatrix::from_real_diagonal(&[self.eps_right, 1.0]))
    }
}

/// Filters of all `n + 1` parties of a linear network.
///
/// Party `A1` filters its single qubit with `first`, party `A(n+1)` with
/// `last`, and each middle party `A(j+2)` filters the qubit it receives from
/// the left source with `middle[j].0` and the one from the right source with
/// `middle[j].1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFilterSpec {
    pub first: f64,
    pub last: f64,
    pub middle: Vec<(f64, f64)>,
}

impl NetworkFilterSpec {
    /// No filtering anywhere in an `n`-source network.
    pub fn identity(n: usize) -> Self {
        Self {
            first: 1.0,
            last: 1.0,
            middle: vec![(1.0, 1.0); n.saturating_sub(1)],
        }
    }

    pub fn new(first: f64, last: f64, middle: Vec<(f64, f64)>) -> Result<Self> {
        check_range("eps_first", first, 0.0, 1.0)?;
        check_range("eps_last", last, 0.0, 1.0)?;
        for &(a, b) in &middle {
            check_range("eps_middle", a, 0.0, 1.0)?;
            check_range("eps_middle", b, 0.0, 1.0)?;
        }
        Ok(Self {
            first,
            last,
            middle,
        })
    }

    pub fn sources(&self) -> usize {
        self.middle.len() + 1
    }

    pub fn is_identity(&self) -> bool {
        self.first == 1.0
            && self.last == 1.0
            && self.middle.iter().all(|&(a, b)| a == 1.0 && b == 1.0)
    }
}

/// Post-selected, renormalized link state and the probability of keeping it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredLink {
    pub state: DensityMatrix4,
    pub success_prob: f64,
}

pub fn apply_link_filter(rho: &DensityMatrix4, f: &LinkFilter) -> Result<FilteredLink> {
    if f.is_identity() {
        return Ok(FilteredLink {
            state: rho.clone(),
            success_prob: 1.0,
        });
    }
    let unnormalized = f.operator().conjugate(rho.matrix());
    let trace = unnormalized.trace().re;
    if !(trace > MIN_SUCCESS_PROBABILITY) {
        return Err(Error::FilterAnnihilatesState {
            link: None,
            probability: trace,
        });
    }
    // Conjugation by a diagonal real operator keeps Hermiticity and
    // positivity exactly, and the trace is normalized away.
    let state = DensityMatrix4::from_trusted(unnormalized.scale_real(1.0 / trace));
    Ok(FilteredLink {
        state,
        success_prob: trace,
    })
}

/// Per-link filters of an `n`-source network: link `j` gets the right-hand
/// filter of party `j` and the left-hand filter of party `j + 1`.
pub fn assign_network_filters(n: usize, spec: &NetworkFilterSpec) -> Result<Vec<LinkFilter>> {
    if n < 2 || spec.middle.len() != n - 1 {
        return Err(Error::LengthMismatch {
            what: "middle filter pairs",
            expected: n.saturating_sub(1),
            actual: spec.middle.len(),
        });
    }
    let mut lefts = Vec::with_capacity(n);
    lefts.push(spec.first);
    lefts.extend(spec.middle.iter().map(|&(_, right_source)| right_source));
    let mut rights: Vec<f64> = spec
        .middle
        .iter()
        .map(|&(left_source, _)| left_source)
        .collect();
    rights.push(spec.last);
    lefts
        .into_iter()
        .zip(rights)
        .map(|(l, r)| LinkFilter::new(l, r))
        .collect()
}

/// The filtered network: one normalized state per link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredNetwork {
    pub links: Vec<FilteredLink>,
    /// Product of the per-link success probabilities.
    pub success_prob: f64,
}

impl FilteredNetwork {
    pub fn states(&self) -> impl Iterator<Item = &DensityMatrix4> {
        self.links.iter().map(|l| &l.state)
    }
}

pub fn filter_network(
    states: &[DensityMatrix4],
    spec: &NetworkFilterSpec,
) -> Result<FilteredNetwork> {
    let filters = assign_network_filters(states.len(), spec)?;
    let links = states
        .iter()
        .zip(&filters)
        .enumerate()
        .map(|(j, (rho, f))| {
            apply_link_filter(rho, f).map_err(|e| match e {
                Error::FilterAnnihilatesState { probability, .. } => {
                    Error::FilterAnnihilatesState {
                        link: Some(j),
                        probability,
                    }
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let success_prob = links.iter().map(|l| l.success_prob).product();
    Ok(FilteredNetwork {
        links,
        success_prob,
    })
}
