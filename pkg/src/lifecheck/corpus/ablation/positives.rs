use std::marker::PhantomData;
use std::ptr;
use std::slice;

pub struct Out<'a> {
    x: *mut String,
    w: &'a mut i32,
}

pub struct Pair {
    y: String,
    z: *mut i32,
}

pub struct Arena {
    base: *mut u8,
    cap: usize,
}

pub struct Cursor<'a> {
    at: *const u8,
    marker: PhantomData<&'a u8>,
}

pub struct Handle {
    id: i32,
}

pub struct Conn {
    db: *mut Handle,
}

pub struct RawVec<'a, T> {
    ptr: *mut T,
    len: usize,
    marker: PhantomData<&'a T>,
}

pub fn leak<'a, 'b>(a: &'a mut i32, b: &'b mut Pair) -> Out<'a> {
    let out = Out { x: &mut (*b).y, w: a };
    out
}

pub fn cursor<'a, 'b>(data: &'b [u8]) -> Cursor<'a> {
    Cursor { at: data.as_ptr(), marker: PhantomData }
}

impl Arena {
    pub fn bytes<'a>(&self) -> &'a [u8] {
        unsafe { slice::from_raw_parts(self.base, self.cap) }
    }
}

impl Conn {
    pub fn set_hook<'c, F>(&'c self, hook: F) where F: FnMut(i32) + 'c {
        register(self.db, hook);
    }
}

impl<'a, T> RawVec<'a, T> {
    pub fn as_mut(&mut self) -> &'a mut [T] {
        unsafe { slice::from_raw_parts_mut(self.ptr, self.len) }
    }
}
