//! `K`-spectra: characters of graded `K`-modules attached to a pair, the
//! transfer of `K`-types through the harmonics, and Lie-level induced
//! multiplicities.

mod character;
mod frame;
mod irreps;
mod modp;
mod roots;
mod series;

pub use character::{decompose, irrep_character, recompose, Character, Irrep, KGroup, Twist};
pub use frame::{k_group, p_frame, w_frame, Frame, SignedPerm};
pub use irreps::{induced_multiplicity, induced_multiplicity_at, tf_check, FactorModule, InducedContext, TfReport, TfRow};
pub use roots::{dimension, irreducible_character, Laurent, RootType};
pub use series::{
    cw_series, full_ring_series, harmonics, ideal_vanishes_at, isotropy_fiber_dims, FiberDims, orbit_ring_series, p4_multiplicity_check, series_equal_upto,
    sp_series, symmetric_characters, transfer_series, transfer_with, Harmonics, KSeries,
};

use crate::lift::LiftError;
use crate::moment::MomentError;

#[derive(Debug, thiserror::Error)]
pub enum KspecError {
    #[error("unsupported group: {0}")]
    Unsupported(String),
    #[error("pair {0} is not in the stable range")]
    NotStableRange(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("bad irreducible label: {0}")]
    Label(String),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Moment(#[from] MomentError),
}
