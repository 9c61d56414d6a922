//! Auditing measured data and judging reconstructions: range conditions,
//! non-uniqueness probes, limited-view visibility and error metrics.

mod limited;
mod metrics;
mod probe;
mod range;
mod visibility;

pub use limited::{limited_view_fbp, zero_fill_arc};
pub use metrics::{edge_sharpness, metrics, rel_l2, rel_linf, EdgeSegment, Metrics};
pub use probe::{coxeter_lines, coxeter_odd, even_about_line, nonuniqueness_probe, odd_about_line, Isometry};
pub use range::{moment_check, orthogonality_check, with_noise, Condition, RangeEntry, RangeReport, DEFAULT_TOLERANCE};
pub use visibility::{visibility_map, VisibilityMap, VisibilitySample, BOUNDARY_SAMPLES};
