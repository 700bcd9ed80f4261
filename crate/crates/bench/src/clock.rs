use std::time::Instant;

use fiberdance_core::{Clock, WorkMeter};

/// Real elapsed time since construction.
#[derive(Clone, Copy, Debug)]
pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn start() -> Self {
        WallClock { start: Instant::now() }
    }
}

impl Clock for WallClock {
    fn elapsed(&self, _meter: &WorkMeter) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}
