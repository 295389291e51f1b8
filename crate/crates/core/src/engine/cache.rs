use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;

use crate::canon::CanonicalKey;

/// Values of already solved theories, shareable between threads.
///
/// Two theories with the same key have the same value, so concurrent inserts
/// for one key never disagree.
#[derive(Debug)]
pub struct Cache<V> {
    map: DashMap<CanonicalKey, V>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl<V: Clone> Cache<V> {
    pub fn new() -> Self {
        Cache { map: DashMap::new(), hits: AtomicU64::new(0), misses: AtomicU64::new(0) }
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<V> {
        match self.map.get(key) {
            Some(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v.clone())
            }
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    /// Lookup without touching the statistics.
    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.map.contains_key(key)
    }

    pub fn insert(&self, key: CanonicalKey, value: V) {
        self.map.insert(key, value);
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn clear(&self) {
        self.map.clear();
    }
}

impl<V: Clone> Default for Cache<V> {
    fn default() -> Self {
        Cache::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_key;
    use crate::parser::parse_theory;
    use crate::preprocess::compile;

    #[test]
    fn hits_and_misses_are_counted() {
        let t = compile(&parse_theory("domain d 2\npredicate P(d)\nP(x)\n").unwrap()).unwrap().theory;
        let key = canonical_key(&t);
        let cache: Cache<u64> = Cache::new();
        assert_eq!(cache.get(&key), None);
        cache.insert(key.clone(), 7);
        assert_eq!(cache.get(&key), Some(7));
        assert_eq!((cache.hits(), cache.misses(), cache.len()), (1, 1, 1));
        cache.clear();
        assert!(cache.is_empty());
    }
}
