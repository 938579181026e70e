//! Simple undirected graphs on `n` labeled vertices, viewed as bit vectors
//! over the C(n,2) vertex pairs.
//!
//! Vertices are labeled `1..=n`. The pair slots are ordered
//! lexicographically: `(1,2), (1,3), ..., (1,n), (2,3), ..., (n-1,n)`; slot
//! `k` of a graph's bit vector says whether the k-th pair is an edge. Two
//! graphs are neighbors when their bit vectors differ in exactly one slot,
//! which is the adjacency notion every auditor in this crate quantifies
//! over.
//!
//! Exhaustive enumeration of all `2^C(n,2)` graphs is the backbone of the
//! exact auditors and is deliberately capped: [`DEFAULT_ENUMERATION_CAP`]
//! vertices by default, and never beyond [`MAX_TABLE_VERTICES`] (the point
//! where a dense f64 table of the space stops fitting in memory).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest `n` enumerated exhaustively unless a caller raises the cap.
pub const DEFAULT_ENUMERATION_CAP: u32 = 6;

/// Hard ceiling for exhaustive work regardless of the configured cap.
/// C(7,2) = 21 pair slots means 2^21 graphs; one more vertex would push
/// dense tables past 2 GiB.
pub const MAX_TABLE_VERTICES: u32 = 7;

/// Number of vertex pairs on `n` labeled vertices: C(n,2).
pub fn edge_slots(n: u32) -> usize {
    let n = n as usize;
    n * (n - 1) / 2
}

/// An unordered vertex pair `{i, j}` with `1 <= i < j`, stored normalized.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeIndex {
    i: u32,
    j: u32,
}

impl EdgeIndex {
    /// Requires `1 <= i < j`. The pair is not checked against any particular
    /// vertex count here; graph operations do that.
    pub fn new(i: u32, j: u32) -> Result<Self> {
        if i >= 1 && i < j {
            Ok(EdgeIndex { i, j })
        } else {
            Err(Error::InvalidEdge { i, j, n: 0 })
        }
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Lexicographic slot of this pair among the C(n,2) pairs on `n`
    /// vertices. Fails if `j > n`.
    pub fn slot(&self, n: u32) -> Result<usize> {
        if self.j > n {
            return Err(Error::InvalidEdge { i: self.i, j: self.j, n });
        }
        let (i, j, n) = (self.i as usize, self.j as usize, n as usize);
        Ok((i - 1) * n - i * (i - 1) / 2 + (j - i - 1))
    }

    /// Inverse of [`EdgeIndex::slot`].
    pub fn from_slot(slot: usize, n: u32) -> Result<Self> {
        let mut rest = slot;
        for i in 1..n {
            let row = (n - i) as usize;
            if rest < row {
                return Ok(EdgeIndex { i, j: i + 1 + rest as u32 });
            }
            rest -= row;
        }
        Err(Error::InvalidEdge { i: 0, j: 0, n })
    }
}

impl core::fmt::Display for EdgeIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// All C(n,2) pairs on `n` vertices in slot order.
pub fn all_edges(n: u32) -> impl Iterator<Item = EdgeIndex> {
    (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| EdgeIndex { i, j }))
}

/// A simple graph on `n` labeled vertices, stored as a packed bit vector
/// over the pair slots (slot k lives at bit `k % 64` of word `k / 64`).
///
/// Invariant: bits beyond slot C(n,2)-1 are zero, so derived equality and
/// hashing are structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: u32,
    bits: Vec<u64>,
}

impl Graph {
    /// Edgeless graph. `n` must be at least 1.
    pub fn empty(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter { what: "vertex count must be at least 1" });
        }
        let words = edge_slots(n).div_ceil(64).max(1);
        Ok(Graph { n, bits: vec![0; words] })
    }

    /// Graph with every pair joined.
    pub fn complete(n: u32) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for slot in 0..edge_slots(n) {
            g.bits[slot / 64] |= 1 << (slot % 64);
        }
        Ok(g)
    }

    pub fn from_edges(n: u32, edges: &[EdgeIndex]) -> Result<Self> {
        let mut g = Graph::empty(n)?;
        for e in edges {
            let slot = e.slot(n)?;
            g.bits[slot / 64] |= 1 << (slot % 64);
        }
        Ok(g)
    }

    /// Rebuild from the low C(n,2) bits of `mask`. Only meaningful while the
    /// whole space fits in one word, i.e. n <= MAX_TABLE_VERTICES.
    pub(crate) fn from_mask64(n: u32, mask: u64) -> Graph {
        debug_assert!(edge_slots(n) <= 64);
        let mut g = Graph::empty(n).expect("n >= 1");
        g.bits[0] = mask;
        g
    }

    /// The packed bit vector as a single word; table index of this graph.
    pub(crate) fn mask64(&self) -> u64 {
        debug_assert!(edge_slots(self.n) <= 64);
        self.bits[0]
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// C(n,2), the length of the bit vector.
    pub fn edge_slots(&self) -> usize {
        edge_slots(self.n)
    }

    /// Number of edges present.
    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn bit(&self, slot: usize) -> bool {
        self.bits[slot / 64] >> (slot % 64) & 1 == 1
    }

    fn set_bit(&mut self, slot: usize, value: bool) {
        if value {
            self.bits[slot / 64] |= 1 << (slot % 64);
        } else {
            self.bits[slot / 64] &= !(1 << (slot % 64));
        }
    }

    pub fn has_edge(&self, e: EdgeIndex) -> Result<bool> {
        Ok(self.bit(e.slot(self.n)?))
    }

    /// Copy of this graph with edge `e` forced present or absent.
    pub fn with_edge(&self, e: EdgeIndex, present: bool) -> Result<Graph> {
        let slot = e.slot(self.n)?;
        let mut g = self.clone();
        g.set_bit(slot, present);
        Ok(g)
    }

    /// Edges present, in slot order.
    pub fn edges(&self) -> Vec<EdgeIndex> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (slot, e) in all_edges(self.n).enumerate() {
            if self.bit(slot) {
                out.push(e);
            }
        }
        out
    }

    /// Bit vector in slot order, e.g. for text serialization.
    pub fn edge_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.edge_slots()).map(move |slot| self.bit(slot))
    }
}

/// Copy of `g` with the state of edge `e` toggled. Involutive.
pub fn edge_flip(g: &Graph, e: EdgeIndex) -> Result<Graph> {
    let slot = e.slot(g.n)?;
    let mut out = g.clone();
    out.bits[slot / 64] ^= 1 << (slot % 64);
    Ok(out)
}

/// All graphs at symmetric-difference distance exactly 1 from `g`, in slot
/// order of the flipped edge. Always C(n,2) of them.
pub fn neighbors(g: &Graph) -> Vec<Graph> {
    all_edges(g.n)
        .map(|e| edge_flip(g, e).expect("edge is valid for g"))
        .collect()
}

/// Number of pair slots on which the two graphs disagree.
pub fn symmetric_difference_size(g: &Graph, h: &Graph) -> Result<usize> {
    if g.n != h.n {
        return Err(Error::VertexCountMismatch { left: g.n, right: h.n });
    }
    Ok(g.bits.iter().zip(&h.bits).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
}

fn check_enumerable(n: u32, cap: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter { what: "vertex count must be at least 1" });
    }
    if n > cap || n > MAX_TABLE_VERTICES {
        return Err(Error::EnumerationCapExceeded { n, cap: cap.min(MAX_TABLE_VERTICES) });
    }
    Ok(())
}

/// All 2^C(n,2) graphs on `n` vertices under the default cap.
///
/// The order is lexicographic on the bit vector with slot 0 most
/// significant, so the edgeless graph comes first and the complete graph
/// last.
pub fn enumerate_graphs(n: u32) -> Result<GraphEnumeration> {
    enumerate_graphs_with_cap(n, DEFAULT_ENUMERATION_CAP)
}

/// As [`enumerate_graphs`] with an explicit cap. The cap can be raised, but
/// never beyond [`MAX_TABLE_VERTICES`].
pub fn enumerate_graphs_with_cap(n: u32, cap: u32) -> Result<GraphEnumeration> {
    check_enumerable(n, cap)?;
    let m = edge_slots(n) as u32;
    Ok(GraphEnumeration { n, m, next: 0, total: 1usize << m })
}

/// Table index (= bit mask) of the graph at lexicographic rank `rank`.
pub(crate) fn mask_from_lex_rank(rank: usize, m: u32) -> u64 {
    if m == 0 {
        return 0;
    }
    (rank as u64).reverse_bits() >> (64 - m)
}

/// Iterator over a whole graph space in lexicographic order.
#[derive(Debug)]
pub struct GraphEnumeration {
    n: u32,
    m: u32,
    next: usize,
    total: usize,
}

impl Iterator for GraphEnumeration {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        if self.next >= self.total {
            return None;
        }
        let mask = mask_from_lex_rank(self.next, self.m);
        self.next += 1;
        Some(Graph::from_mask64(self.n, mask))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.total - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for GraphEnumeration {}
