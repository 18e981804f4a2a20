//! Classification of symmetric multiqubit states by secant varieties of the
//! rational normal curve.
//!
//! States live in the symmetric subspace and are written in the induced
//! basis (see [`states`]). Catalecticant ranks give the secant family
//! ([`catalecticant`]); apolar kernels refine it into proper-secant and
//! tangent classes with explicit Waring decompositions ([`sylvester`]).
//! [`slocc`] implements local invertible operations, stochastic
//! implementation and the GHZ₃ → W₃ limit, and [`rdm`] relates the ranks to
//! reduced density matrices and parent Hamiltonians. [`io`] reads and
//! writes JSON state files.
//!
//! Every numeric entry point is generic over [`Field`]: exact Gaussian
//! rationals ([`GaussianRational`]) or `Complex64` with a rank tolerance.

pub mod catalecticant;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod rdm;
pub mod scalar;
pub mod slocc;
pub mod states;
pub mod sylvester;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::RankMode;
pub use scalar::{Field, GaussianRational, Mode, Scalar};
pub use states::{DecomposedState, LocalVector, MultiIndex, SymState, Term};
pub use sylvester::{classify, ClassificationReport, Label};
