//! Fully decentralized equalization: local equalizers per cluster followed
//! by inverse-variance fusion of the local estimates.

mod cluster;
mod weights;

pub use cluster::{cluster_equalize, fd_equalize, ClusterContext, ClusterOutput};
pub use weights::{fuse_estimates, fused_variance_with, optimal_fusion_weights, FusionWeights, VARIANCE_FLOOR};
