//! Hidden non-n-locality in linear quantum networks.
//!
//! Two-qubit link states are built from parameterized families, passed
//! through optional noise channels and diagonal local filters, and scored
//! with the closed-form n-local bounds. An explicit-settings evaluator, a
//! Born-rule oracle for small networks and a multi-start optimizer
//! cross-check the closed forms.

// Negated comparisons double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;

pub mod bloch;
pub mod channels;
pub mod conjecture;
pub mod density;
pub mod filtering;
pub mod linalg;
pub mod matrix;
pub mod network;
pub mod optim;
pub mod oracle;
pub mod sampling;
pub mod states;

pub use bloch::{
    bloch_decompose, canonical_frame, correlation_singular_values, from_bloch, BlochForm,
    CorrelationSpectrum,
};
pub use channels::{
    amplitude_damping, apply_channel, apply_channel_both_qubits, bit_flip, KrausChannel, Sides,
};
pub use conjecture::{conjecture_search, ConjectureReport};
pub use density::{validate_density, DensityMatrix4};
pub use error::{Error, Result};
pub use filtering::{
    apply_link_filter, assign_network_filters, filter_network, filter_operator, FilteredLink,
    FilteredNetwork, LinkFilter, NetworkFilterSpec,
};
pub use matrix::{ComplexMatrix, C64};
pub use network::{
    b_lin, b_seq, evaluate, lhs_at_settings, maximize_lhs, EvalResult, LhsMaximum, MaximizeOptions,
    MeasurementSettings, NetworkSpec,
};
pub use oracle::{born_oracle, OracleResult};
pub use states::{
    grud_state, product_state, pure_theta_state, werner_state, x_state, GrudParams, ProductParams,
    PureThetaParam, WernerParam, XParams,
};
