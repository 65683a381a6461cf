//! Origin/progeny bookkeeping for one reduction step.
//!
//! Both maps default to the singleton of the key itself: a node nobody
//! touched is its own origin and its own progeny. An explicit empty list
//! means the node emerges from nothing (origin) or dissolves (progeny).
//!
//! Every mutator keeps the two maps mirror images of each other, so
//! `x ∈ progeny(y)` holds exactly when `y ∈ origin(x)` for explicit entries.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::syntax::{Expr, NodeId};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProvenanceStore {
    origin: HashMap<NodeId, Vec<NodeId>>,
    progeny: HashMap<NodeId, Vec<NodeId>>,
}

/// A broken mirror link or duplicated entry found by [`ProvenanceStore::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryViolation(pub String);

impl fmt::Display for SymmetryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn effective(map: &HashMap<NodeId, Vec<NodeId>>, id: NodeId) -> Vec<NodeId> {
    map.get(&id).cloned().unwrap_or_else(|| vec![id])
}

fn is_default_self(map: &HashMap<NodeId, Vec<NodeId>>, id: NodeId) -> bool {
    map.get(&id).is_none_or(|v| v.as_slice() == [id])
}

/// Drops `item` from `map[key]`, materializing the default entry if needed.
fn remove_from(map: &mut HashMap<NodeId, Vec<NodeId>>, key: NodeId, item: NodeId) {
    match map.get_mut(&key) {
        Some(list) => list.retain(|&x| x != item),
        None if key == item => {
            map.insert(key, Vec::new());
        }
        None => {}
    }
}

impl ProvenanceStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn origin(&self, id: NodeId) -> Vec<NodeId> {
        effective(&self.origin, id)
    }

    pub fn progeny(&self, id: NodeId) -> Vec<NodeId> {
        effective(&self.progeny, id)
    }

    pub fn explicit_origin(&self, id: NodeId) -> Option<&[NodeId]> {
        self.origin.get(&id).map(Vec::as_slice)
    }

    pub fn explicit_progeny(&self, id: NodeId) -> Option<&[NodeId]> {
        self.progeny.get(&id).map(Vec::as_slice)
    }

    /// Explicit origin entries in ascending key order.
    pub fn origin_entries(&self) -> Vec<(NodeId, &[NodeId])> {
        let mut v: Vec<_> = self
            .origin
            .iter()
            .map(|(k, l)| (*k, l.as_slice()))
            .collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    pub fn is_empty(&self) -> bool {
        self.origin.is_empty() && self.progeny.is_empty()
    }

    /// The same links viewed from the other side of the step.
    pub fn reversed(&self) -> Self {
        ProvenanceStore {
            origin: self.progeny.clone(),
            progeny: self.origin.clone(),
        }
    }

    /// Makes `parent` the sole origin of `newborn` and `newborn` the sole progeny of `parent`.
    pub fn mark_origin(&mut self, newborn: NodeId, parent: NodeId) {
        for old in self.origin(newborn) {
            if old != parent {
                remove_from(&mut self.progeny, old, newborn);
            }
        }
        for old in self.progeny(parent) {
            if old != newborn {
                remove_from(&mut self.origin, old, parent);
            }
        }
        self.origin.insert(newborn, vec![parent]);
        self.progeny.insert(parent, vec![newborn]);
    }

    /// Adds `parent` to the origins of `newborn`, first discarding the
    /// default self-entry on either side.
    pub fn add_origin(&mut self, newborn: NodeId, parent: NodeId) {
        if is_default_self(&self.origin, newborn) {
            if self.origin.contains_key(&newborn) {
                remove_from(&mut self.progeny, newborn, newborn);
            }
            self.origin.insert(newborn, Vec::new());
        }
        if is_default_self(&self.progeny, parent) {
            if self.progeny.contains_key(&parent) {
                remove_from(&mut self.origin, parent, parent);
            }
            self.progeny.insert(parent, Vec::new());
        }
        let origins = self.origin.entry(newborn).or_default();
        if !origins.contains(&parent) {
            origins.insert(0, parent);
        }
        let children = self.progeny.entry(parent).or_default();
        if !children.contains(&newborn) {
            children.insert(0, newborn);
        }
    }

    /// Marks `item` and its descendants as disappearing, skipping nodes that
    /// already have recorded progeny.
    pub fn dissolve(&mut self, item: &Expr) {
        item.walk(&mut |e| {
            let id = e.id();
            if is_default_self(&self.progeny, id) {
                self.dissolve_one(id);
            }
        });
    }

    /// [`dissolve`](Self::dissolve) for a single node, without recursion.
    pub(crate) fn dissolve_node(&mut self, id: NodeId) {
        if is_default_self(&self.progeny, id) {
            self.dissolve_one(id);
        }
    }

    /// For a node present on both sides of a step: if it is its own origin,
    /// make it its own progeny too, and vice versa.
    pub(crate) fn keep_identity(&mut self, id: NodeId) {
        let in_origin = self.origin(id).contains(&id);
        let in_progeny = self.progeny(id).contains(&id);
        if in_origin && !in_progeny {
            self.progeny.entry(id).or_default().push(id);
        } else if in_progeny && !in_origin {
            self.origin.entry(id).or_default().push(id);
        }
    }

    fn dissolve_one(&mut self, id: NodeId) {
        for child in self.progeny(id) {
            remove_from(&mut self.origin, child, id);
        }
        self.progeny.insert(id, Vec::new());
    }

    /// Marks `item` and its descendants as emerging, skipping nodes that
    /// already have recorded origins.
    pub fn eradicate(&mut self, item: &Expr) {
        item.walk(&mut |e| {
            let id = e.id();
            if is_default_self(&self.origin, id) {
                self.eradicate_one(id);
            }
        });
    }

    /// Like [`eradicate`](Self::eradicate) but unconditional.
    pub fn eradicate_always(&mut self, item: &Expr) {
        item.walk(&mut |e| self.eradicate_one(e.id()));
    }

    fn eradicate_one(&mut self, id: NodeId) {
        for parent in self.origin(id) {
            remove_from(&mut self.progeny, parent, id);
        }
        self.origin.insert(id, Vec::new());
    }

    /// Replaces the progeny of `node` with `children`, keeping the mirror side in sync.
    pub(crate) fn set_progeny(&mut self, node: NodeId, children: Vec<NodeId>) {
        for old in self.progeny(node) {
            if !children.contains(&old) {
                remove_from(&mut self.origin, old, node);
            }
        }
        self.progeny.insert(node, children);
    }

    /// In `child`'s origins, replaces `from` with `to` (all of them, in order).
    pub(crate) fn repoint_origin(&mut self, child: NodeId, from: NodeId, to: &[NodeId]) {
        let mut origins = self.origin(child);
        let at = origins.iter().position(|&x| x == from).unwrap_or(0);
        origins.retain(|&x| x != from);
        let mut insert_at = at.min(origins.len());
        for &t in to {
            if !origins.contains(&t) {
                origins.insert(insert_at, t);
                insert_at += 1;
            }
        }
        self.origin.insert(child, origins);
        remove_from(&mut self.progeny, from, child);
        for &t in to {
            if is_default_self(&self.progeny, t) && !self.progeny.contains_key(&t) {
                self.progeny.insert(t, Vec::new());
            }
            let list = self.progeny.entry(t).or_default();
            if !list.contains(&child) {
                list.push(child);
            }
        }
    }

    /// Forgets every node outside `keep`, along with links pointing at them.
    pub fn restrict_to(&mut self, keep: &HashSet<NodeId>) {
        for map in [&mut self.origin, &mut self.progeny] {
            map.retain(|k, _| keep.contains(k));
            for list in map.values_mut() {
                list.retain(|x| keep.contains(x));
            }
        }
    }

    /// Verifies the mirror invariant and the absence of duplicates.
    pub fn check(&self) -> Result<(), SymmetryViolation> {
        for (name, map) in [("origin", &self.origin), ("progeny", &self.progeny)] {
            for (k, list) in map {
                let unique: HashSet<_> = list.iter().collect();
                if unique.len() != list.len() {
                    return Err(SymmetryViolation(format!(
                        "duplicate entries in {name}({k})"
                    )));
                }
            }
        }
        for (&y, children) in &self.progeny {
            for &x in children {
                if !self.origin(x).contains(&y) {
                    return Err(SymmetryViolation(format!(
                        "{x} in progeny({y}) but {y} not in origin({x})"
                    )));
                }
            }
        }
        for (&x, parents) in &self.origin {
            for &y in parents {
                if !self.progeny(y).contains(&x) {
                    return Err(SymmetryViolation(format!(
                        "{y} in origin({x}) but {x} not in progeny({y})"
                    )));
                }
            }
        }
        Ok(())
    }
}
