//! Scenario-driven front end for `specframe`: parse a TOML scenario, run the
//! criterion and the numerical sweeps, and render the report.

pub mod report;
pub mod run;
pub mod scenario;

pub use report::{Command, Report};
pub use run::{run, run_scenario};
pub use scenario::{parse_scenario, Scenario, ScenarioError, ScenarioErrors};

/// Scenarios shipped with the tool, as `(name, document)`.
pub const SHIPPED_SCENARIOS: [(&str, &str); 4] = [
    ("example1_k1", include_str!("../scenarios/example1_k1.toml")),
    ("example1_k2", include_str!("../scenarios/example1_k2.toml")),
    ("example1_k3", include_str!("../scenarios/example1_k3.toml")),
    ("riesz_z_minus_2", include_str!("../scenarios/riesz_z_minus_2.toml")),
];

pub fn shipped_scenario(name: &str) -> Option<&'static str> {
    SHIPPED_SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, d)| *d)
}
