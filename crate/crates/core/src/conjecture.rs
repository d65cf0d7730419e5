//! Randomized search for filtered violations in bilocal networks whose link
//! states have null local Bloch vectors, together with the closed-form
//! filtered correlations of such states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{bloch_decompose, from_bloch, BlochForm};
use crate::density::DensityMatrix4;
use crate::error::{Error, Result};
use crate::filtering::{apply_link_filter, LinkFilter, NetworkFilterSpec};
use crate::linalg::{mat_mul, transpose, Mat3, ZERO3};
use crate::network::{b_lin, b_seq, NetworkSpec};

/// Diagonal correlations and success probability of a null-Bloch state with
/// diagonal correlation tensor `diag(t)` after filtering with
/// `diag(ε_left, 1) ⊗ diag(ε_right, 1)`.
///
/// With `e = ε²` and `c = t₃(1−e_L)(1−e_R) + (1+e_L)(1+e_R)`:
/// `t″ₖ = 4 ε_L ε_R tₖ / c` for `k = 1, 2`,
/// `t″₃ = [(1−e_L)(1−e_R) + t₃(1+e_L)(1+e_R)] / c`, success `c / 4`.
pub fn null_bloch_filtered_correlations(
    t: [f64; 3],
    eps_left: f64,
    eps_right: f64,
) -> ([f64; 3], f64) {
    let (el, er) = (eps_left * eps_left, eps_right * eps_right);
    let c = t[2] * (1.0 - el) * (1.0 - er) + (1.0 + el) * (1.0 + er);
    let transverse = 4.0 * eps_left * eps_right / c;
    (
        [
            transverse * t[0],
            transverse * t[1],
            ((1.0 - el) * (1.0 - er) + t[2] * (1.0 + el) * (1.0 + er)) / c,
        ],
        c / 4.0,
    )
}

/// Bell-diagonal correlations: `λ` weights on `(φ⁺, φ⁻, ψ⁺, ψ⁻)`.
fn bell_diagonal(weights: &[f64]) -> [f64; 3] {
    const SIGNS: [[f64; 3]; 4] = [
        [1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0],
    ];
    std::array::from_fn(|k| weights.iter().zip(SIGNS).map(|(w, s)| w * s[k]).sum())
}

/// Uniformly random proper rotation from a normalized Gaussian quaternion.
fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let len = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / len);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

fn null_bloch_state(correlation: Mat3) -> Result<DensityMatrix4> {
    from_bloch(&BlochForm {
        correlation,
        ..BlochForm::zero()
    })
}

fn diagonal(t: [f64; 3]) -> Mat3 {
    let mut m = ZERO3;
    for k in 0..3 {
        m[k][k] = t[k];
    }
    m
}

/// How a trial's link pair was drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// Bell-diagonal states in random local frames, kept only if `b_lin ≤ 1`.
    RotatedBellDiagonal,
    /// A pair of Werner states with `b_lin ≤ 1`.
    Werner,
    /// Bell-diagonal states rescaled towards white noise so that `b_lin = 1`.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureTrial {
    pub index: usize,
    pub kind: SampleKind,
    pub b_lin: f64,
    pub b_seq: f64,
    pub success_prob: f64,
    pub filters: NetworkFilterSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub trials: usize,
    pub seed: u64,
    pub max_b_seq: f64,
    pub best: ConjectureTrial,
    /// Trials with `b_seq > 1 + 1e-9`.
    pub violations: usize,
    /// Largest deviation between the closed-form filtered correlations and
    /// direct filtering, over every link drawn.
    pub closed_form_max_error: f64,
}

struct Sample {
    kind: SampleKind,
    diagonals: [[f64; 3]; 2],
    correlations: [Mat3; 2],
}

fn draw_sample<R: Rng + ?Sized>(rng: &mut R) -> Sample {
    let dirichlet = Dirichlet::new(&[1.0; 4]).expect("valid concentration");
    loop {
        let kind = match rng.gen_range(0..3) {
            0 => SampleKind::RotatedBellDiagonal,
            1 => SampleKind::Werner,
            _ => SampleKind::Boundary,
        };
        let mut diagonals = match kind {
            SampleKind::Werner => [0, 1].map(|_| [-rng.gen_range(0.0..=1.0_f64); 3]),
            _ => [0, 1].map(|_| bell_diagonal(&dirichlet.sample(rng))),
        };
        let bound = {
            let s: Vec<[f64; 3]> = diagonals
                .iter()
                .map(|d| {
                    let mut a = d.map(f64::abs);
                    a.sort_by(|x, y| y.total_cmp(x));
                    a
                })
                .collect();
            (s[0][0] * s[1][0] + s[0][1] * s[1][1]).sqrt()
        };
        if kind == SampleKind::Boundary {
            // Scaling up could leave the physical tetrahedron.
            if bound < 1.0 {
                continue;
            }
            let k = 1.0 / bound;
            diagonals = diagonals.map(|d| d.map(|x| x * k));
        } else if bound > 1.0 {
            continue;
        }
        let correlations = diagonals.map(|d| {
            let w = diagonal(d);
            if kind == SampleKind::RotatedBellDiagonal {
                let (ra, rb) = (random_rotation(rng), random_rotation(rng));
                mat_mul(&mat_mul(&ra, &w), &transpose(&rb))
            } else {
                w
            }
        });
        return Sample {
            kind,
            diagonals,
            correlations,
        };
    }
}

/// Largest deviation of [`null_bloch_filtered_correlations`] from direct
/// filtering of the diagonal state.
pub fn closed_form_error(t: [f64; 3], filter: &LinkFilter) -> Result<f64> {
    let rho = null_bloch_state(diagonal(t))?;
    let direct = apply_link_filter(&rho, filter)?;
    let w = bloch_decompose(&direct.state).correlation;
    let (expected, success) =
        null_bloch_filtered_correlations(t, filter.eps_left(), filter.eps_right());
    let mut err = (direct.success_prob - success).abs();
    for (i, row) in w.iter().enumerate() {
        for (j, &wij) in row.iter().enumerate() {
            let e = if i == j { expected[i] } else { 0.0 };
            err = err.max((wij - e).abs());
        }
    }
    Ok(err)
}

fn run_trial(index: usize, seed: u64) -> Result<(ConjectureTrial, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let sample = draw_sample(&mut rng);
    let links = sample
        .correlations
        .iter()
        .map(|w| null_bloch_state(*w))
        .collect::<Result<Vec<_>>>()?;
    // Keep filters away from zero so post-selection stays possible.
    let mut eps = || rng.gen_range(1e-3..=1.0);
    let filters = NetworkFilterSpec::new(eps(), eps(), vec![(eps(), eps())])?;
    let spec = NetworkSpec::new(links, filters.clone())?;
    let (b, success) = b_seq(&spec)?;
    let mut err = 0.0_f64;
    for (d, f) in sample
        .diagonals
        .iter()
        .zip(crate::filtering::assign_network_filters(2, &filters)?)
    {
        err = err.max(closed_form_error(*d, &f)?);
    }
    Ok((
        ConjectureTrial {
            index,
            kind: sample.kind,
            b_lin: b_lin(spec.links()),
            b_seq: b,
            success_prob: success,
            filters,
        },
        err,
    ))
}

/// Evaluates `trials` random null-Bloch bilocal networks with `b_lin ≤ 1`
/// under random filters and reports the largest filtered bound.
///
/// Trials run in parallel; each draws from its own stream of the seeded
/// generator, so the report depends only on `(trials, seed)`.
pub fn conjecture_search(trials: usize, seed: u64) -> Result<ConjectureReport> {
    if trials == 0 {
        return Err(Error::param(
            "trials",
            0.0,
            "at least one trial is required",
        ));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(i, seed))
        .collect::<Result<Vec<_>>>()?;
    let closed_form_max_error = outcomes.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    let violations = outcomes
        .iter()
        .filter(|(t, _)| t.b_seq > 1.0 + 1e-9)
        .count();
    let best = outcomes
        .into_iter()
        .map(|(t, _)| t)
        .reduce(|best, t| if t.b_seq > best.b_seq { t } else { best })
        .expect("at least one trial");
    Ok(ConjectureReport {
        trials,
        seed,
        max_b_seq: best.b_seq,
        best,
        violations,
        closed_form_max_error,
    })
}
