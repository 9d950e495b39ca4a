//! Compensated (Neumaier) summation.
//!
//! Increment statistics subtract predictions from responses term by term, so
//! sums of many near-cancelling values show up everywhere. Plain `f64` folds
//! lose digits exactly where the tests need them; this keeps the running
//! error in a second word.

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice, in index order.
pub(crate) fn sum(values: &[f64]) -> f64 {
    let mut a = Accum::default();
    for &v in values {
        a.add(v);
    }
    a.value()
}
