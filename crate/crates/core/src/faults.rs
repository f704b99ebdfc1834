//! Runtime switches that deliberately break an operator, used to check that
//! the verification suites detect the defect.

use core::sync::atomic::{AtomicBool, Ordering};

static STAR_SIGN: AtomicBool = AtomicBool::new(false);

/// Flip the overall sign of the Hodge star.
pub fn set_star_sign_flip(on: bool) {
    STAR_SIGN.store(on, Ordering::SeqCst);
}

pub(crate) fn star_sign_flipped() -> bool {
    STAR_SIGN.load(Ordering::Relaxed)
}
