//! Planar duality, minimal cut-set enumeration and Peierls-type bounds for
//! Bernoulli bond percolation on planar graphs with polynomial growth and
//! positive isoperimetric exponent.
//!
//! The pipeline mirrors the argument that such graphs have `p_c < 1`:
//!
//! 1. [`embedding`] / [`lattice`]: finite windows of planar graphs as rotation systems.
//! 2. [`dual`]: the dual multigraph and the cut-set / dual-cycle correspondence.
//! 3. [`profiles`]: window-certified growth constants `(K, D)` and isoperimetric constants `(k, ε)`.
//! 4. [`paths`]: exact simple-path counts `p(n)` in the dual and the doubling inequality.
//! 5. [`cutsets`]: exact minimal cut-set censuses, the counting bound and the threshold `p*`.
//! 6. [`percolation`]: Monte Carlo estimates of `p_c` to confront with `p*`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cutsets;
pub mod dual;
pub mod embedding;
pub mod error;
pub mod lattice;
pub mod paths;
pub mod percolation;
pub mod profiles;
pub mod region;

pub use cutsets::{CutsetCensus, PeierlsBound};
pub use dual::{dualize, DualCycle, DualGraph};
pub use embedding::{Ball, EdgeId, FaceId, PlanarEmbedding, Truncation, VertexId};
pub use error::{Error, Result};
pub use lattice::Family;
pub use paths::{BoundConstant, PathScope};
pub use percolation::{PcEstimate, SweepResult};
pub use profiles::ConstantsProfile;
pub use region::Region;
