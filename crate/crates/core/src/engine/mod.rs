//! The lifted counting driver.

mod cache;
mod driver;
pub mod rules;
pub mod simplify;
mod value;

pub use cache::Cache;
pub use driver::{smoothing_factor, wfomc, wfomc_float, wfomc_with, Stats};
pub use value::Value;

use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Lifted rules only, grounding when stuck.
    R,
    /// Lifted rules plus domain recursion.
    RD,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub mode: Mode,
    /// In RD mode, recurse on a domain instead of grounding when the grounding
    /// would exceed `ground_atom_limit`.
    pub dr_before_grounding: bool,
    /// Node budget of a single domain-recursion probe.
    pub probe_budget: u64,
    /// Largest number of ground atoms the grounding fallback may produce.
    pub ground_atom_limit: u64,
    pub float_mode: bool,
    pub use_cache: bool,
    /// Abort after this many engine nodes.
    pub node_budget: Option<u64>,
    pub deadline: Option<Instant>,
}

impl EngineConfig {
    pub fn new(mode: Mode) -> Self {
        EngineConfig {
            mode,
            dr_before_grounding: mode == Mode::RD,
            probe_budget: 1000,
            ground_atom_limit: 30,
            float_mode: false,
            use_cache: true,
            node_budget: None,
            deadline: None,
        }
    }

    pub fn with_ground_limit(mut self, limit: u64) -> Self {
        self.ground_atom_limit = limit;
        self
    }
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig::new(Mode::RD)
    }
}
