// The hook only has to outlive 'c, yet the connection keeps it for as long as it lives.
pub struct InnerConnection {
    db: *mut ffi::sqlite3,
    owned: bool,
}

pub struct Connection {
    db: RefCell<InnerConnection>,
}

impl Connection {
    pub fn update_hook<'c, F>(&'c self, hook: Option<F>)
    where
        F: FnMut(Action, &str, &str, i64) + Send + 'c,
    {
        self.db.borrow_mut().update_hook(hook);
    }
}
