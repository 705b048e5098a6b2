/// Uniformly spaced sample times `start + k * step` for `k in 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        Self { start, step, len }
    }

    /// `len` samples covering `[0, duration]` inclusive.
    pub fn covering(duration: f64, len: usize) -> Self {
        let step = if len > 1 {
            duration / (len - 1) as f64
        } else {
            0.0
        };
        Self::new(0.0, step, len)
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.time(self.len.saturating_sub(1))
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.time(k))
    }
}
