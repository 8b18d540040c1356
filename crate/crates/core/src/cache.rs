use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, RwLock};

/// Memo table with shared reads and exclusive inserts. Values are computed
/// outside the lock, so recursive lookups do not deadlock.
pub(crate) struct Cache<K, V>(RwLock<HashMap<K, Arc<V>>>);

impl<K: Eq + Hash, V> Cache<K, V> {
    pub(crate) fn new() -> Self {
        Cache(RwLock::new(HashMap::new()))
    }

    pub(crate) fn get_or(&self, key: K, compute: impl FnOnce() -> V) -> Arc<V> {
        if let Some(v) = self.0.read().expect("cache lock").get(&key) {
            return Arc::clone(v);
        }
        let v = Arc::new(compute());
        Arc::clone(self.0.write().expect("cache lock").entry(key).or_insert(v))
    }

    pub(crate) fn len(&self) -> usize {
        self.0.read().expect("cache lock").len()
    }
}

impl<K: Eq + Hash, V> Default for Cache<K, V> {
    fn default() -> Self {
        Self::new()
    }
}
