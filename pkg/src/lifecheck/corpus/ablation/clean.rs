use std::marker::PhantomData;

pub struct Slot<'a> {
    p: *mut i32,
    marker: PhantomData<&'a i32>,
}

pub struct Pair {
    y: String,
    z: *mut i32,
}

pub fn first<'a>(v: &'a [i32]) -> &'a i32 {
    &v[0]
}

pub fn name<'a>(p: &'a Pair) -> &'a String {
    &(*p).y
}

pub fn set(a: &mut i32, b: &i32) {
    *a = *b;
}

pub fn count(p: &Pair) -> usize {
    p.y.len()
}

impl<'a> Slot<'a> {
    pub fn get(&'a mut self) -> &'a mut i32 {
        unsafe { &mut *self.p }
    }

    pub fn is_null(&self) -> bool {
        self.p.is_null()
    }
}
