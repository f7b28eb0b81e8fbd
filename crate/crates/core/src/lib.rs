//! Witnessed k-distance: a linear-size power-distance approximation of the
//! distance to the uniform measure on a point cloud, together with exact
//! oracles (brute-force barycenters, exact Wasserstein-2), samplers and 2D
//! sublevel-set persistence.

pub mod bounds;
pub mod checks;
pub mod cli;
pub mod dtm;
pub mod error;
pub mod geometry;
pub mod io;
pub mod sampling;
pub mod topology;
pub mod transport;

pub use dtm::{brute_force_sites, eval_dtm, DiscreteMeasure, KDistance, WitnessedKDistance};
pub use error::{Error, Result};
pub use geometry::{barycenter_site, NeighborIndex, PointCloud, PowerDistance, WeightedSite};
pub use transport::{w2_assignment, w2_empirical_to_reference, w2_exact, TransportPlan, W2Result};
