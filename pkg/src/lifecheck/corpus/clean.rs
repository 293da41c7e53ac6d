// Functions whose annotations agree with what the bodies do.
use std::marker::PhantomData;
use std::ptr;

pub struct Holder<'a> {
    r: &'a i32,
}

pub struct Buf {
    data: *mut u8,
    len: usize,
}

pub struct Slot<'a> {
    p: *mut i32,
    marker: PhantomData<&'a i32>,
}

pub struct Node {
    key: i32,
    next: *mut Node,
}

pub fn first<'a>(v: &'a [i32]) -> &'a i32 {
    &v[0]
}

pub fn pick<'a>(x: &'a String, y: &'a String) -> &'a String {
    if x.len() > y.len() { x } else { y }
}

pub fn wrap<'a>(r: &'a i32) -> Holder<'a> {
    Holder { r: r }
}

pub fn pass_through(p: *const i32) -> *const i32 {
    p
}

pub fn swap_vals(a: &mut i32, b: &mut i32) {
    let t = *a;
    *a = *b;
    *b = t;
}

pub fn slice_len<T>(s: &[T]) -> usize {
    s.len()
}

pub fn new_node(key: i32) -> Node {
    Node { key: key, next: ptr::null_mut() }
}

impl Buf {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl<'a> Slot<'a> {
    pub fn get(&'a mut self) -> &'a mut i32 {
        unsafe { &mut *self.p }
    }
}
