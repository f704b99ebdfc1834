//! Order-fixed compensated summation, so that reductions are reproducible.

use crate::C64;

#[derive(Clone, Copy, Default)]
pub(crate) struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.s + self.c
    }
}

#[derive(Clone, Copy, Default)]
pub(crate) struct CSum {
    re: Sum,
    im: Sum,
}

impl CSum {
    #[inline]
    pub(crate) fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub(crate) fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}
