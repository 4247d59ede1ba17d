//! Smooth maximal functions `M_phi f(x) = sup_t |(φ_t * f)(x)|` of extended
//! distributions and `H^p` quasi-norm estimates.
//!
//! `φ` is the polynomial bump `c (1 - |x|^2)^m`, which is only `C^(m-1)`; with
//! `m >= N_p + 3` that covers every derivative the estimates use. Quasi-norms
//! are computed in the frame where the support fills the unit ball, on a grid
//! that is uniform near the support and coarsens dyadically outward, with the
//! region beyond the truncation radius bounded by the decay envelope
//! `|x|^(-(N_p+1+n))`.

mod convolve;
mod envelope;
mod hp;
mod mollifier;

pub use convolve::{convolve_at, maximal_at, maximal_at_restricted, MaximalValue, ScaleRange, Smoother, TGrid};
pub use envelope::{
    envelope_check, far_field_decay, log_log_fit, near_dirac_blowup, EnvelopeReport, EnvelopeSample, LogLogFit,
};
pub use hp::{hp_partial_sum, hp_quasinorm, normalize, Frame, HpEstimate, HpGrid, MaximalField, ScaleBin};
pub use mollifier::{mollifier_derivative, Mollifier, MollifierSpec};
pub(crate) use mollifier::gauss_legendre;
