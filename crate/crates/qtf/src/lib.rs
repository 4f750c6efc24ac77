//! Exact construction and verification of quasi-tight framelet filter banks.
//!
//! Starting from a finitely supported real low-pass filter `a` and an integer
//! dilation matrix `M`, this crate builds finite families of high-pass filters
//! `b_1, ..., b_s` with signs `eps_l` in `{-1, +1}` such that
//!
//! ```text
//! conj(a^(xi)) a^(xi + 2 pi w) + sum_l eps_l conj(b_l^(xi)) b_l^(xi + 2 pi w)
//!     = delta(w)   for all w in Omega_M
//! ```
//!
//! holds as an identity of trigonometric polynomials. All bookkeeping runs in
//! arbitrary-precision rational arithmetic, so verification means the residual
//! is zero exactly, not small. Floating point appears only at the edges:
//! smoothness exponents, frequency spot-checks, and sample exports.
//!
//! The main entry points:
//!
//! - [`construct_directional`]: two-tap high-pass filters (difference of two
//!   unit taps), one per eliminated product term; tight whenever the coset
//!   product condition allows.
//! - [`construct_vm_sos`] / [`construct_vm_linear`] / [`construct_differencing`]:
//!   banks whose high-pass filters all have at least `m` vanishing moments,
//!   up to the ceiling `min(sr(a, M), vmo(u_a)/2)`.
//! - [`verify_bank`]: exact residual of the defining identity plus recomputed
//!   vanishing moments.
//! - [`smoothness_l2`]: the L2 smoothness exponent of the refinable function,
//!   by two independent methods.
//! - [`analyze`] / [`synthesize`]: exact multi-level filter bank transforms.
//! - [`fixture`]: bundled reference banks covering dyadic, quincunx,
//!   determinant-3, and two-dimensional dyadic dilations.

pub mod analysis;
pub mod dft;
pub mod directional;
pub mod error;
pub mod filterbank;
pub mod fixtures;
pub mod json;
mod krylov;
pub mod lattice;
pub mod laurent;
pub mod ratio;
pub mod sampler;
pub mod smoothness;
pub mod solver;
pub mod specfact;
pub mod verify;
pub mod vmconstruct;
pub mod vmdecomp;

pub use analysis::{
    analyze_filter, predicted_highpass_count, square_deficit, sum_rule_order,
    tightness_condition, vm_ceiling, FilterReport,
};
pub use dft::{analyze, synthesize, Decomposition, ScaledArray};
pub use directional::{
    canonical_shift_rep, construct_directional, same_bank_multiset, DirectionalOpts,
};
pub use error::{Error, Result};
pub use filterbank::{basic_sum_rule, build_na, coset_row, BankMeta, QtfBank, ScaledFilter, Sign};
pub use fixtures::{all_fixtures, fixture, fixture_names};
pub use lattice::{make_context, DilationContext};
pub use laurent::{multi_indices, nabla_delta, LaurentMatrix, RationalLaurent, Vmo};
pub use ratio::{format_rational, parse_rational, rat_to_f64, Rat};
pub use sampler::{phi_csv, psi_csv, sample_framelet, sample_refinable, PhiSamples, PsiSamples};
pub use smoothness::{smoothness_l2, SmMethod, SmoothnessEstimate, SmoothnessOpts};
pub use solver::LinearSystem;
pub use specfact::{
    factor_hermitian, scalar_quasi_sos, ColumnTerm, HermitianFactorization, ScalarQuasiSos,
};
pub use verify::{spot_check_frequency, verify_bank, VerificationReport};
pub use vmconstruct::{
    build_e_matrix, construct_differencing, construct_vm_linear, construct_vm_sos, coset_deficit,
    VmLinearOpts,
};
pub use vmdecomp::{nabla_decompose, nabla_reconstruct, signed_squares_vm, squares_reconstruct};
