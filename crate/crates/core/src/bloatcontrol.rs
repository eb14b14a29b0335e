//! The Tarpeian method: before evaluation, members larger than the
//! population's mean size are killed with probability `kill_proportion`.
//! Killed members carry the worst fitness and are never evaluated.

use rand::Rng;

use crate::error::{GpError, Result};
use crate::fitness::{mean_size, Individual};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TarpeianConfig {
    pub kill_proportion: f64,
    pub enabled: bool,
}

impl TarpeianConfig {
    pub fn new(kill_proportion: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kill_proportion) {
            return Err(GpError::invalid(
                "tarpeian.kill_proportion",
                format!("{kill_proportion} is outside [0, 1]"),
            ));
        }
        Ok(TarpeianConfig {
            kill_proportion,
            enabled: kill_proportion > 0.0,
        })
    }

    pub fn disabled() -> Self {
        TarpeianConfig {
            kill_proportion: 0.0,
            enabled: false,
        }
    }

    pub fn is_active(&self) -> bool {
        self.enabled && self.kill_proportion > 0.0
    }
}

impl Default for TarpeianConfig {
    fn default() -> Self {
        TarpeianConfig::disabled()
    }
}

/// Marks strictly-above-mean members as killed, each independently with
/// probability `kill_proportion`. Returns the number marked.
pub fn tarpeian_mark<R: Rng + ?Sized>(
    pop: &mut [Individual],
    cfg: &TarpeianConfig,
    sentinel_error: f64,
    rng: &mut R,
) -> usize {
    for m in pop.iter_mut() {
        m.tarpeian_killed = false;
    }
    if !cfg.is_active() || pop.is_empty() {
        return 0;
    }
    let mean = mean_size(pop);
    let mut marked = 0;
    for m in pop.iter_mut().filter(|m| m.size() as f64 > mean) {
        if rng.gen::<f64>() < cfg.kill_proportion {
            m.kill(sentinel_error);
            marked += 1;
        }
    }
    marked
}
