//! Model spaces, product signatures and discretized unit balls.
//!
//! Every ball is sampled on a polar tensor grid. The hyperbolic ball is
//! produced by pushing the Euclidean grid through the exponential map at the
//! origin of the Poincaré disk and then moving to horocyclic coordinates
//! `(x, y)`, in which the metric reads `dx² + e^{2x} dy²`.

mod cloud;
mod hyperbolic;
mod sampling;
mod signature;

pub use cloud::{geodesic_diameter, Chart, PointCloud};
pub use hyperbolic::{
    disk_distance, disk_to_horocyclic, exp_map_h2, halfplane_distance, horocyclic_distance,
    horocyclic_to_halfplane,
};
pub use sampling::{
    sample, sample_euclidean_ball, sample_hyperbolic_ball, sample_sphere_cap, Resolution,
    SamplingSpec, HYPERBOLIC_R_MAX, HYPERBOLIC_R_MIN,
};
pub use signature::{ModelSpace, ProductSignature, SpaceKind};
