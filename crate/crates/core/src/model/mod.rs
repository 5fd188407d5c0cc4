//! Domain types: network instances, per-cut capacity models, the cut
//! capacity function `f`, its quadratic reformulation `q`, and s-t cuts.

mod capacity;
mod cuts;
mod instance;
mod omega;

pub use capacity::{CapacityModel, QuadraticForm};
pub use cuts::{enumerate_cuts, internal_nodes, Cut};
pub use instance::{Arc, CovarianceSpec, InstanceFile, NetworkInstance};
pub use omega::{omega_from_epsilon, OmegaModel};
