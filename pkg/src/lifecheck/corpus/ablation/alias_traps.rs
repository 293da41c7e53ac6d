// Signatures that match a bug pattern while the bodies never move the value.
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

pub fn fresh<'a, 'b>(a: &'a mut i32, b: &'b mut Pair) -> Out<'a> {
    Out { x: ptr::null_mut(), w: a }
}

pub fn blank_cursor<'a, 'b>(data: &'b [u8]) -> Cursor<'a> {
    Cursor { at: ptr::null(), marker: PhantomData }
}

impl Arena {
    pub fn no_bytes<'a>(&self) -> &'a [u8] {
        empty_bytes()
    }
}

impl Conn {
    pub fn drop_hook<'c, F>(&'c self, hook: F) where F: FnMut(i32) + 'c {
        drop(hook);
    }
}

impl<'a, T> RawVec<'a, T> {
    pub fn as_mut_empty(&mut self) -> &'a mut [T] {
        unsafe { slice::from_raw_parts_mut(ptr::null_mut(), 0) }
    }
}
