//! Spectrum regions with three-valued membership, spectral images under
//! holomorphic maps, the zero-in-image test and the approximate point
//! spectrum probe.

mod probe;
mod region;
mod winding;

pub use probe::{
    ap_distance, default_grid, probe_ap_equals_spectrum, ProbeOutcome, ProbePoint, ProbeReport, ProbeStatus,
};
pub(crate) use probe::{check_n_list, stabilized};
pub use region::{image_region, locate_zero, region_membership, Membership, SpectrumRegion, ZeroSearch};
pub use winding::{winding_number, zero_in_image, ZeroInImage, ZeroTest, MIN_WINDING_SAMPLES, WINDING_SAMPLE_CAP};
