// The returned Waker keeps a raw pointer to `wake`, but Waker comes from the
// standard library and its fields are not visible here.
use std::task::{RawWaker, Waker};

pub fn waker<'a, W>(wake: &'a W) -> Waker {
    unsafe { Waker::from_raw(raw_waker(wake)) }
}
