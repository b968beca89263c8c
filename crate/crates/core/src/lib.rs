//! Optimal single-buyer selling mechanisms under restricted allocation sets.
//!
//! The library works with a type space `X = [0, M]^n`, a closed bounded set of
//! feasible allocations `S` given by its vertices, and a buyer type density
//! `f`. Expected revenue of a mechanism with consumer-surplus function `u`
//! equals the integral of `u` against a signed "transformed" measure built
//! from `f`, so mechanism design becomes maximizing that integral. The crate
//! provides:
//!
//! * [`allocation`]: the allocation set and its support function, which
//!   bounds `u(x) - u(y)` for every feasible mechanism;
//! * [`measure`]: discretized signed measures: the transform of a density,
//!   integration, Jordan decomposition, and mass-spread operators;
//! * [`menu`]: finite menu mechanisms, cell measures, revenue two ways, and
//!   integrate-to-zero price calibration;
//! * [`transport`]: the discretized dual as a min-cost transportation
//!   problem, solved exactly with node potentials that certify optimality;
//! * [`certify`]: duality-gap certificates, a 1-D stochastic dominance test,
//!   and the matching-condition verifier;
//! * [`presets`]: self-contained benchmark instances used by the CLI and the
//!   acceptance tests.

pub mod allocation;
pub mod certify;
pub mod error;
pub mod exec;
pub mod measure;
pub mod menu;
pub mod presets;
pub mod transport;
pub mod viz;

pub use allocation::AllocationSet;
pub use certify::{CertificateReport, Verdict};
pub use error::{Error, Result};
pub use measure::{DensitySpec, SignedMeasure, SpreadSpec};
pub use menu::{CellReport, Menu};
pub use transport::{TransportInstance, TransportPlan};
