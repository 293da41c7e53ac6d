// Iterator over an intrusive linked list whose lifetime is not tied to the cache.
use std::marker::PhantomData;

pub struct LruEntry<K, V> {
    key: K,
    val: V,
    next: *mut LruEntry<K, V>,
}

pub struct LruCache<K, V> {
    head: *mut LruEntry<K, V>,
    len: usize,
}

pub struct Iter<'a, K: 'a, V: 'a> {
    len: usize,
    ptr: *const LruEntry<K, V>,
    phantom: PhantomData<&'a K>,
}

impl<K, V> LruCache<K, V> {
    pub fn iter<'a>(&'_ self) -> Iter<'a, K, V> {
        Iter {
            len: self.len,
            ptr: unsafe { (*self.head).next },
            phantom: PhantomData,
        }
    }
}
