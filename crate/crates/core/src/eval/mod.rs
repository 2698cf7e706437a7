//! Error metrics, cumulative error curves, and rigid alignment.

mod ced;
mod icp;
mod metrics;
mod report;

pub use ced::{ced, uniform_thresholds, write_ced_csv, CedCurve, DEFAULT_CED_STEPS};
pub use icp::{icp_align, IcpConfig, IcpOutcome, RigidTransform};
pub use metrics::{
    bbox_diagonal, bbox_size, interocular_distance, nme, Normalizer, LEFT_EYE_OUTER,
    RIGHT_EYE_OUTER,
};
pub use report::{write_report_csv, SampleReport};
