//! Sublevel-set topology of planar functions sampled on a grid.

mod field;
mod persistence;
pub mod svg;
mod vineyard;

pub use field::{rasterize, BoundingBox, ScalarField2D};
pub use persistence::{
    betti_at_level, euler_characteristic, sublevel_persistence, PersistenceDiagram, PersistencePair,
};
pub use vineyard::{parse_k_range, vineyard_sweep, Vineyard, VineyardRecord};
