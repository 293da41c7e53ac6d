// Iterator methods hand out items that outlive the borrow of the iterator,
// which is fine because each item is yielded once.
use std::marker::PhantomData;

pub struct IterMut<'a, T> {
    ptr: *mut T,
    end: *mut T,
    marker: PhantomData<&'a mut T>,
}

pub struct ChunksMut<'a, T> {
    ptr: *mut T,
    left: usize,
    marker: PhantomData<&'a mut T>,
}

impl<'a, T> Iterator for IterMut<'a, T> {
    type Item = &'a mut T;

    fn next(&mut self) -> Option<&'a mut T> {
        let p = self.ptr;
        self.ptr = step(p);
        Some(&mut *p)
    }
}

impl<'a, T> DoubleEndedIterator for IterMut<'a, T> {
    fn next_back(&mut self) -> Option<&'a mut T> {
        self.end = back(self.end);
        Some(&mut *self.end)
    }
}

impl<'a, T> Iterator for ChunksMut<'a, T> {
    type Item = &'a mut T;

    fn next(&mut self) -> Option<&'a mut T> {
        let p = self.ptr;
        self.left -= 1;
        Some(&mut *p)
    }
}

impl<'a, T> DoubleEndedIterator for ChunksMut<'a, T> {
    fn next_back(&mut self) -> Option<&'a mut T> {
        let p = self.ptr;
        Some(&mut *p)
    }
}
