use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use super::{Dist, DynamicGraph};
use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsMode {
    Decremental,
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelChange {
    pub vertex: usize,
    pub old: Dist,
    pub new: Dist,
}

/// Result of one ES-tree update: level changes (including entering/leaving the
/// ball) and parent-pointer changes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EsDelta {
    pub changes: Vec<LevelChange>,
    pub reparented: Vec<(usize, Option<usize>, Option<usize>)>,
}

impl EsDelta {
    pub fn is_empty(&self) -> bool {
        self.changes.is_empty() && self.reparented.is_empty()
    }
}

/// Even–Shiloach tree: BFS levels from `root` truncated at `radius`, kept
/// under deletions (decremental) or insertions (incremental).
#[derive(Debug, Clone)]
pub struct EsTree {
    root: usize,
    radius: u32,
    mode: EsMode,
    level: Vec<u32>,
    parent: Vec<usize>,
}

fn to_dist(l: u32) -> Dist {
    if l == ABSENT {
        Dist::Inf
    } else {
        Dist::Finite(l)
    }
}

struct Journal {
    level: BTreeMap<usize, u32>,
    parent: BTreeMap<usize, usize>,
}

impl Journal {
    fn new() -> Self {
        Journal { level: BTreeMap::new(), parent: BTreeMap::new() }
    }
}

impl EsTree {
    pub fn new(g: &DynamicGraph, root: usize, radius: u32, mode: EsMode) -> Self {
        let n = g.n();
        let mut t = EsTree { root, radius, mode, level: vec![ABSENT; n], parent: vec![usize::MAX; n] };
        t.level[root] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            let lx = t.level[x];
            if lx == radius {
                continue;
            }
            for y in g.out_neighbors(x) {
                if t.level[y] == ABSENT {
                    t.level[y] = lx + 1;
                    t.parent[y] = x;
                    q.push_back(y);
                }
            }
        }
        t
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn mode(&self) -> EsMode {
        self.mode
    }

    pub fn level(&self, v: usize) -> Dist {
        to_dist(self.level[v])
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != usize::MAX).then_some(self.parent[v])
    }

    pub fn contains(&self, v: usize) -> bool {
        self.level[v] != ABSENT
    }

    /// Vertices of the ball with their levels.
    pub fn ball(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.level.iter().enumerate().filter(|(_, &l)| l != ABSENT).map(|(v, &l)| (v, l))
    }

    /// Tree edges as `(parent, child)`.
    pub fn tree_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter(|(_, &p)| p != usize::MAX).map(|(v, &p)| (p, v))
    }

    fn touch(&self, j: &mut Journal, v: usize) {
        j.level.entry(v).or_insert(self.level[v]);
        j.parent.entry(v).or_insert(self.parent[v]);
    }

    fn finish(&self, j: Journal) -> EsDelta {
        let mut d = EsDelta::default();
        for (v, old) in j.level {
            if old != self.level[v] {
                d.changes.push(LevelChange { vertex: v, old: to_dist(old), new: to_dist(self.level[v]) });
            }
        }
        for (v, old) in j.parent {
            if old != self.parent[v] {
                let wrap = |p: usize| (p != usize::MAX).then_some(p);
                d.reparented.push((v, wrap(old), wrap(self.parent[v])));
            }
        }
        d
    }

    /// Repairs the tree after edge `(u, v)` was removed from `g`.
    pub fn delete(&mut self, g: &DynamicGraph, u: usize, v: usize) -> Result<EsDelta> {
        if self.mode != EsMode::Decremental {
            return Err(Error::ModeViolation("es delete on an incremental tree".into()));
        }
        let mut j = Journal::new();
        let mut heap = BinaryHeap::new();
        let mut orient = vec![(u, v)];
        if !g.is_directed() {
            orient.push((v, u));
        }
        for (a, b) in orient {
            if self.parent[b] == a {
                heap.push(Reverse((self.level[b], b)));
            }
        }
        while let Some(Reverse((l, x))) = heap.pop() {
            if l != self.level[x] || self.level[x] == ABSENT {
                continue;
            }
            let p = self.parent[x];
            if p != usize::MAX && self.level[p] != ABSENT && self.level[p] + 1 == l && g.has_edge(p, x) {
                continue;
            }
            self.touch(&mut j, x);
            if let Some(w) = g.in_neighbors(x).find(|&w| self.level[w] != ABSENT && self.level[w] + 1 == l) {
                self.parent[x] = w;
                continue;
            }
            // No parent one level up: x drops a level and its children must recheck.
            for y in g.out_neighbors(x) {
                if self.parent[y] == x {
                    heap.push(Reverse((self.level[y], y)));
                }
            }
            if l + 1 > self.radius {
                self.level[x] = ABSENT;
                self.parent[x] = usize::MAX;
            } else {
                self.level[x] = l + 1;
                self.parent[x] = usize::MAX;
                heap.push(Reverse((l + 1, x)));
            }
        }
        Ok(self.finish(j))
    }

    /// Relaxes the tree after edge `(u, v)` was added to `g`.
    pub fn insert(&mut self, g: &DynamicGraph, u: usize, v: usize) -> Result<EsDelta> {
        if self.mode != EsMode::Incremental {
            return Err(Error::ModeViolation("es insert on a decremental tree".into()));
        }
        let mut j = Journal::new();
        let mut q = VecDeque::new();
        let mut orient = vec![(u, v)];
        if !g.is_directed() {
            orient.push((v, u));
        }
        for (a, b) in orient {
            let la = self.level[a];
            if la != ABSENT && la < self.radius && la + 1 < self.level[b] {
                self.touch(&mut j, b);
                self.level[b] = la + 1;
                self.parent[b] = a;
                q.push_back(b);
            }
        }
        while let Some(x) = q.pop_front() {
            let lx = self.level[x];
            if lx >= self.radius {
                continue;
            }
            for y in g.out_neighbors(x) {
                if lx + 1 < self.level[y] {
                    self.touch(&mut j, y);
                    self.level[y] = lx + 1;
                    self.parent[y] = x;
                    q.push_back(y);
                }
            }
        }
        Ok(self.finish(j))
    }
}
