//! Wall-clock hooks for solver traces.
//!
//! The core crate has no clock of its own. Solvers take a [`Stopwatch`]
//! type parameter; without `std` the default is [`NoClock`], which always
//! reports zero elapsed time.

pub trait Stopwatch {
    fn start() -> Self;
    fn elapsed_seconds(&self) -> f64;
}

/// A stopwatch that never advances.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Stopwatch for NoClock {
    fn start() -> Self {
        NoClock
    }

    fn elapsed_seconds(&self) -> f64 {
        0.0
    }
}

#[cfg(feature = "std")]
#[derive(Debug, Clone, Copy)]
pub struct StdStopwatch(std::time::Instant);

#[cfg(feature = "std")]
impl Stopwatch for StdStopwatch {
    fn start() -> Self {
        StdStopwatch(std::time::Instant::now())
    }

    fn elapsed_seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[cfg(feature = "std")]
pub type DefaultStopwatch = StdStopwatch;
#[cfg(not(feature = "std"))]
pub type DefaultStopwatch = NoClock;
