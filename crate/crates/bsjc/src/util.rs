//! Small numerical helpers shared across modules.

/// Kahan–Neumaier compensated accumulator.
///
/// All reductions in this crate that feed reported numbers go through a fixed
/// iteration order plus this accumulator, which keeps the summation error at
/// ~1 ulp independent of length and — just as important here — makes every
/// result bit-reproducible across runs and thread counts (parallel code fills
/// buffers; it never splits a floating-point reduction).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Kahan {
    s: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        // Neumaier's variant: pick the compensation branch by magnitude so
        // adding a term larger than the running sum stays exact too.
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}
