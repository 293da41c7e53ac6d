// The returned slice is tied to 'a rather than to the borrow of the row.
pub struct MatrixSliceMut<'a, T: 'a> {
    ptr: *mut T,
    rows: usize,
    cols: usize,
    row_stride: usize,
    marker: PhantomData<&'a mut T>,
}

pub struct RowMut<'a, T: 'a> {
    row: MatrixSliceMut<'a, T>,
}

impl<'a, T: 'a> RowMut<'a, T> {
    /// Returns the row as a slice.
    pub fn raw_slice_mut(&'_ mut self) -> &'a mut [T] {
        unsafe { from_raw_parts_mut(self.row.ptr, self.row.cols) }
    }
}
