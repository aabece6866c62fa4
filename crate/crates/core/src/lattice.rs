//! Finite lattices built from cover relations.
//!
//! General lattices are stored as explicit tables: up-sets and down-sets as
//! bit rows (indexed by position in a linear extension) and full join/meet
//! tables. Boolean lattices of subsets of `[n]` use the subset encoding
//! directly, so `2^[20]` stays addressable without quadratic tables.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::subsets::MAX_GROUND_SET;

pub const MAX_TABLE_ELEMENTS: usize = 4096;

#[derive(Clone, PartialEq, Eq)]
struct BitRow(Vec<u64>);

impl BitRow {
    fn zeros(len: usize) -> Self {
        BitRow(vec![0; len.div_ceil(64)])
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn or_assign(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn and(&self, other: &BitRow) -> BitRow {
        BitRow(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn last(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

#[derive(Clone, PartialEq, Eq)]
struct Table {
    /// Position of each element in a fixed linear extension (bottom first).
    pos: Vec<usize>,
    /// Element at each position.
    at: Vec<usize>,
    /// `up[x]`: positions of elements `y >= x`.
    up: Vec<BitRow>,
    /// `down[x]`: positions of elements `y <= x`.
    down: Vec<BitRow>,
    join: Vec<u16>,
    meet: Vec<u16>,
    covers: Vec<Vec<usize>>,
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    Boolean { bits: u32 },
    Table(Box<Table>),
}

/// A finite lattice on elements `0..len()`.
///
/// Immutable after construction; share it behind an [`Arc`].
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    n: usize,
    top: usize,
    bottom: usize,
    repr: Repr,
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Boolean { bits } => write!(f, "FiniteLattice::Boolean({bits})"),
            Repr::Table(_) => f
                .debug_struct("FiniteLattice")
                .field("n", &self.n)
                .field("covers", &self.cover_pairs())
                .finish(),
        }
    }
}

impl FiniteLattice {
    /// Builds a lattice on `n` elements from its cover pairs `(lower, upper)`.
    ///
    /// Every listed pair must be a genuine cover; pairs implied by
    /// transitivity are rejected.
    pub fn from_covers(n: usize, cover_pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLattice);
        }
        if n > MAX_TABLE_ELEMENTS {
            return Err(Error::SizeLimitExceeded {
                requested: n,
                limit: MAX_TABLE_ELEMENTS,
            });
        }
        let mut succ = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for &(lo, hi) in cover_pairs {
            for idx in [lo, hi] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, len: n });
                }
            }
            if lo == hi {
                return Err(Error::CyclicCovers);
            }
            if !seen.insert((lo, hi)) {
                return Err(Error::DuplicateCover {
                    lower: lo,
                    upper: hi,
                });
            }
            succ[lo].push(hi);
        }
        for s in &mut succ {
            s.sort_unstable();
        }

        // Kahn's algorithm; ties broken by smallest index for determinism.
        let mut indeg = vec![0usize; n];
        for s in &succ {
            for &y in s {
                indeg[y] += 1;
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&x| indeg[x] == 0).collect();
        let mut at = Vec::with_capacity(n);
        while let Some(x) = ready.pop_first() {
            at.push(x);
            for &y in &succ[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.insert(y);
                }
            }
        }
        if at.len() != n {
            return Err(Error::CyclicCovers);
        }
        let mut pos = vec![0usize; n];
        for (p, &x) in at.iter().enumerate() {
            pos[x] = p;
        }

        let mut up = vec![BitRow::zeros(n); n];
        for &x in at.iter().rev() {
            let mut row = BitRow::zeros(n);
            row.set(pos[x]);
            for &y in &succ[x] {
                row.or_assign(&up[y]);
            }
            up[x] = row;
        }
        let mut down = vec![BitRow::zeros(n); n];
        for x in 0..n {
            for p in up[x].ones() {
                down[at[p]].set(pos[x]);
            }
        }

        for (lo, s) in succ.iter().enumerate() {
            for &hi in s {
                let implied = s.iter().any(|&c| c != hi && up[c].get(pos[hi]));
                if implied {
                    return Err(Error::NonCoverEdge { lower: lo, upper: hi });
                }
            }
        }

        let up_count: Vec<usize> = up.iter().map(BitRow::count).collect();
        let down_count: Vec<usize> = down.iter().map(BitRow::count).collect();
        let mut join = vec![0u16; n * n];
        let mut meet = vec![0u16; n * n];
        for x in 0..n {
            join[x * n + x] = x as u16;
            meet[x * n + x] = x as u16;
            for y in (x + 1)..n {
                let uppers = up[x].and(&up[y]);
                let lub = uppers
                    .first()
                    .map(|p| at[p])
                    .filter(|&c| up_count[c] == uppers.count() && up[c] == uppers)
                    .ok_or(Error::NotALattice {
                        x,
                        y,
                        bound: "join",
                    })?;
                let lowers = down[x].and(&down[y]);
                let glb = lowers
                    .last()
                    .map(|p| at[p])
                    .filter(|&c| down_count[c] == lowers.count() && down[c] == lowers)
                    .ok_or(Error::NotALattice {
                        x,
                        y,
                        bound: "meet",
                    })?;
                join[x * n + y] = lub as u16;
                join[y * n + x] = lub as u16;
                meet[x * n + y] = glb as u16;
                meet[y * n + x] = glb as u16;
            }
        }

        let bottom = at[0];
        let top = at[n - 1];
        // With all pairwise joins and meets present these are the extremes.
        debug_assert_eq!(up_count[bottom], n);
        debug_assert_eq!(down_count[top], n);

        Ok(FiniteLattice {
            n,
            top,
            bottom,
            repr: Repr::Table(Box::new(Table {
                pos,
                at,
                up,
                down,
                join,
                meet,
                covers: succ,
            })),
        })
    }

    /// Subsets of `[bits]` ordered by inclusion; element `i` is the subset with mask `i`.
    pub fn boolean(bits: u32) -> Result<Self> {
        if bits == 0 || bits > MAX_GROUND_SET {
            return Err(Error::SizeLimitExceeded {
                requested: bits as usize,
                limit: MAX_GROUND_SET as usize,
            });
        }
        let n = 1usize << bits;
        Ok(FiniteLattice {
            n,
            top: n - 1,
            bottom: 0,
            repr: Repr::Boolean { bits },
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// Ground-set size when this is a subset-encoded Boolean lattice.
    pub fn boolean_bits(&self) -> Option<u32> {
        match self.repr {
            Repr::Boolean { bits } => Some(bits),
            Repr::Table(_) => None,
        }
    }

    pub fn check_element(&self, x: usize) -> Result<()> {
        if x < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: x,
                len: self.n,
            })
        }
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        match &self.repr {
            Repr::Boolean { .. } => x & !y == 0,
            Repr::Table(t) => t.up[x].get(t.pos[y]),
        }
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn join(&self, x: usize, y: usize) -> usize {
        match &self.repr {
            Repr::Boolean { .. } => x | y,
            Repr::Table(t) => t.join[x * self.n + y] as usize,
        }
    }

    pub fn meet(&self, x: usize, y: usize) -> usize {
        match &self.repr {
            Repr::Boolean { .. } => x & y,
            Repr::Table(t) => t.meet[x * self.n + y] as usize,
        }
    }

    pub fn join_all(&self, base: usize, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(base, |acc, y| self.join(acc, y))
    }

    /// Elements covering `x`, in increasing index order.
    pub fn covers(&self, x: usize) -> Vec<usize> {
        match &self.repr {
            Repr::Boolean { bits } => (0..*bits)
                .filter(|i| x >> i & 1 == 0)
                .map(|i| x | 1 << i)
                .collect(),
            Repr::Table(t) => t.covers[x].clone(),
        }
    }

    /// `d_x`, the number of elements covering `x`.
    pub fn cover_degree(&self, x: usize) -> usize {
        match &self.repr {
            Repr::Boolean { bits } => (*bits - (x as u32).count_ones()) as usize,
            Repr::Table(t) => t.covers[x].len(),
        }
    }

    /// `d_max`, the largest cover degree.
    pub fn d_max(&self) -> usize {
        match &self.repr {
            Repr::Boolean { bits } => *bits as usize,
            Repr::Table(t) => t.covers.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    /// All cover pairs `(lower, upper)`, sorted.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|x| self.covers(x).into_iter().map(move |y| (x, y)))
            .collect()
    }

    /// Elements strictly above `x`.
    pub fn strictly_above(&self, x: usize) -> Vec<usize> {
        match &self.repr {
            Repr::Boolean { .. } => (0..self.n).filter(|&y| y != x && x & !y == 0).collect(),
            Repr::Table(t) => {
                let mut v: Vec<usize> = t.up[x].ones().map(|p| t.at[p]).filter(|&y| y != x).collect();
                v.sort_unstable();
                v
            }
        }
    }

    /// Length of the longest chain from `x` up to the top.
    pub fn height_to_top(&self) -> Vec<usize> {
        match &self.repr {
            Repr::Boolean { bits } => (0..self.n)
                .map(|x| (*bits - (x as u32).count_ones()) as usize)
                .collect(),
            Repr::Table(t) => {
                let mut h = vec![0usize; self.n];
                for &x in t.at.iter().rev() {
                    h[x] = t.covers[x].iter().map(|&y| h[y] + 1).max().unwrap_or(0);
                }
                h
            }
        }
    }

    /// Elements ordered from the top down: by height to the top, ties by index.
    pub fn top_down_order(&self) -> Vec<usize> {
        let h = self.height_to_top();
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| (h[x], x));
        order
    }

    pub fn is_chain(&self) -> bool {
        self.incomparable_pair().is_none()
    }

    /// First pair `(b, c)` with `b < c` as indices and `b`, `c` incomparable.
    pub fn incomparable_pair(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|b| ((b + 1)..self.n).map(move |c| (b, c)))
            .find(|&(b, c)| !self.leq(b, c) && !self.leq(c, b))
    }

    /// Checks the distributive law `a ∨ (b ∧ c) = (a ∨ b) ∧ (a ∨ c)` on all
    /// triples and, independently, the cancellation property
    /// (`x ∨ y = x ∨ z` and `x ∧ y = x ∧ z` imply `y = z`). The two must agree.
    pub fn is_distributive(&self) -> bool {
        if self.boolean_bits().is_some() {
            return true;
        }
        let by_law = self.distributive_by_law();
        let by_cancellation = self.distributive_by_cancellation();
        assert_eq!(
            by_law, by_cancellation,
            "distributivity tests disagree on {self:?}"
        );
        by_law
    }

    pub fn distributive_by_law(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| {
            (0..n).all(|b| {
                (0..n).all(|c| {
                    self.join(a, self.meet(b, c)) == self.meet(self.join(a, b), self.join(a, c))
                })
            })
        })
    }

    pub fn distributive_by_cancellation(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| {
            (0..n).all(|y| {
                ((y + 1)..n).all(|z| {
                    !(self.join(x, y) == self.join(x, z) && self.meet(x, y) == self.meet(x, z))
                })
            })
        })
    }

    /// Checks that distinct nonempty sets of covers of `x` have distinct joins.
    ///
    /// Subsets are enumerated in increasing bit-mask order over the sorted
    /// cover list; the first collision is returned as a witness (two subsets
    /// of covering elements). At most `len() + 1` subsets are ever visited.
    pub fn verify_distinct_joins(&self, x: usize) -> Result<DistinctJoins> {
        self.check_element(x)?;
        let covers = self.covers(x);
        let d = covers.len();
        let mut seen: HashMap<usize, u128> = HashMap::new();
        let total: u128 = if d >= 127 { u128::MAX } else { (1u128 << d) - 1 };
        let mut mask: u128 = 1;
        while mask <= total {
            let members: Vec<usize> = (0..d)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| covers[i])
                .collect();
            let j = self.join_all(x, members.iter().copied());
            if let Some(&previous) = seen.get(&j) {
                let first: Vec<usize> = (0..d)
                    .filter(|i| previous >> i & 1 == 1)
                    .map(|i| covers[i])
                    .collect();
                return Ok(DistinctJoins::Collision {
                    first,
                    second: members,
                    join: j,
                });
            }
            seen.insert(j, mask);
            if mask == u128::MAX {
                break;
            }
            mask += 1;
        }
        Ok(DistinctJoins::Distinct)
    }

    /// Restricts the order to `elements`, which must be closed under join and meet.
    pub fn sublattice(self: &Arc<Self>, elements: &[usize]) -> Result<Sublattice> {
        let mut members: Vec<usize> = elements.to_vec();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::EmptyLattice);
        }
        for &x in &members {
            self.check_element(x)?;
        }
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        for (i, &x) in members.iter().enumerate() {
            for &y in &members[i + 1..] {
                if !local.contains_key(&self.join(x, y)) {
                    return Err(Error::NotASublattice { x, y, op: "join" });
                }
                if !local.contains_key(&self.meet(x, y)) {
                    return Err(Error::NotASublattice { x, y, op: "meet" });
                }
            }
        }
        let k = members.len();
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let (x, y) = (members[i], members[j]);
                if self.lt(x, y)
                    && !members
                        .iter()
                        .any(|&z| self.lt(x, z) && self.lt(z, y))
                {
                    pairs.push((i, j));
                }
            }
        }
        let induced = FiniteLattice::from_covers(k, &pairs)?;
        Ok(Sublattice {
            host: Arc::clone(self),
            lattice: Arc::new(induced),
            embedding: members,
        })
    }

    /// Finds `{a, b, c, d}` with `b`, `c` incomparable, `a = b ∧ c`, `d = b ∨ c`.
    pub fn find_square(&self) -> Option<[usize; 4]> {
        self.incomparable_pair()
            .map(|(b, c)| [self.meet(b, c), b, c, self.join(b, c)])
    }

    /// Rebuilds this lattice through [`FiniteLattice::from_covers`], turning a
    /// subset-encoded Boolean lattice into an explicit table.
    pub fn to_table(&self) -> Result<Self> {
        FiniteLattice::from_covers(self.n, &self.cover_pairs())
    }
}

/// Outcome of [`FiniteLattice::verify_distinct_joins`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistinctJoins {
    Distinct,
    Collision {
        first: Vec<usize>,
        second: Vec<usize>,
        join: usize,
    },
}

impl DistinctJoins {
    pub fn is_distinct(&self) -> bool {
        matches!(self, DistinctJoins::Distinct)
    }
}

/// A subset of a host lattice closed under its join and meet, together with
/// the induced lattice on local indices.
#[derive(Debug, Clone)]
pub struct Sublattice {
    pub host: Arc<FiniteLattice>,
    pub lattice: Arc<FiniteLattice>,
    /// `embedding[i]` is the host element for local element `i` (increasing).
    pub embedding: Vec<usize>,
}

impl Sublattice {
    pub fn local_index(&self, host_element: usize) -> Option<usize> {
        self.embedding.binary_search(&host_element).ok()
    }
}

/// Chain `0 < 1 < ... < len-1`.
pub fn chain(len: usize) -> Result<FiniteLattice> {
    let pairs: Vec<(usize, usize)> = (1..len).map(|i| (i - 1, i)).collect();
    FiniteLattice::from_covers(len, &pairs)
}

/// Bottom `0`, atoms `1..=k`, top `k + 1`.
pub fn diamond(k: usize) -> Result<FiniteLattice> {
    if k == 0 {
        return Err(Error::InvalidArgument("diamond needs at least one atom".into()));
    }
    let top = k + 1;
    let mut pairs = Vec::with_capacity(2 * k);
    for a in 1..=k {
        pairs.push((0, a));
        pairs.push((a, top));
    }
    FiniteLattice::from_covers(k + 2, &pairs)
}

/// The pentagon `N5`: `0 < a < b < 1`, `0 < c < 1`, with `0, a, b, c, 1` as `0..5`.
pub fn pentagon() -> FiniteLattice {
    FiniteLattice::from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
        .expect("pentagon is a lattice")
}

/// Componentwise order on `left × right`; element `(i, j)` has index `i * right.len() + j`.
pub fn product(left: &FiniteLattice, right: &FiniteLattice) -> Result<FiniteLattice> {
    let (p, q) = (left.len(), right.len());
    let size = p.checked_mul(q).unwrap_or(usize::MAX);
    if size > MAX_TABLE_ELEMENTS {
        return Err(Error::SizeLimitExceeded {
            requested: size,
            limit: MAX_TABLE_ELEMENTS,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..p {
        for j in 0..q {
            for i2 in left.covers(i) {
                pairs.push((i * q + j, i2 * q + j));
            }
            for j2 in right.covers(j) {
                pairs.push((i * q + j, i * q + j2));
            }
        }
    }
    FiniteLattice::from_covers(size, &pairs)
}

/// Breadth-first search order from the bottom; used by the exchange format writer.
pub fn bfs_from_bottom(l: &FiniteLattice) -> Vec<usize> {
    let mut seen = vec![false; l.len()];
    let mut order = Vec::with_capacity(l.len());
    let mut queue = VecDeque::from([l.bottom()]);
    seen[l.bottom()] = true;
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for y in l.covers(x) {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    order
}

/// Named lattices used by the test suites and the CLI.
pub mod catalog {
    use super::*;

    pub type Entry = (String, Arc<FiniteLattice>);

    fn entry(name: &str, l: FiniteLattice) -> Entry {
        (name.to_string(), Arc::new(l))
    }

    /// Lattices with at most six elements.
    pub fn small() -> Vec<Entry> {
        let two = chain(2).unwrap();
        let three = chain(3).unwrap();
        vec![
            entry("chain1", chain(1).unwrap()),
            entry("chain2", two.clone()),
            entry("chain4", chain(4).unwrap()),
            entry("chain6", chain(6).unwrap()),
            entry("boolean2", FiniteLattice::boolean(2).unwrap()),
            entry("boolean2-table", FiniteLattice::boolean(2).unwrap().to_table().unwrap()),
            entry("diamond2", diamond(2).unwrap()),
            entry("diamond3", diamond(3).unwrap()),
            entry("diamond4", diamond(4).unwrap()),
            entry("pentagon", pentagon()),
            entry("chain2xchain3", product(&two, &three).unwrap()),
        ]
    }

    /// [`small`] plus larger members (up to 64 elements).
    pub fn all() -> Vec<Entry> {
        let mut v = small();
        let two = chain(2).unwrap();
        let b2 = FiniteLattice::boolean(2).unwrap();
        v.extend([
            entry("boolean3", FiniteLattice::boolean(3).unwrap()),
            entry("boolean4", FiniteLattice::boolean(4).unwrap()),
            entry("boolean3-table", FiniteLattice::boolean(3).unwrap().to_table().unwrap()),
            entry("chain2xboolean2", product(&two, &b2).unwrap()),
            entry("chain3xchain3", product(&chain(3).unwrap(), &chain(3).unwrap()).unwrap()),
            entry("diamond3xchain2", product(&diamond(3).unwrap(), &two).unwrap()),
            entry("pentagonxchain2", product(&pentagon(), &two).unwrap()),
            entry("boolean2xchain4", product(&b2, &chain(4).unwrap()).unwrap()),
            entry("diamond5", diamond(5).unwrap()),
            entry("boolean5", FiniteLattice::boolean(5).unwrap()),
        ]);
        v
    }

    /// Resolves names such as `boolean3`, `chain5`, `diamond3`, `pentagon`,
    /// and products like `chain2xboolean2`.
    pub fn by_name(name: &str) -> Result<FiniteLattice> {
        if let Some((left, right)) = name.split_once('x') {
            return product(&by_name(left)?, &by_name(right)?);
        }
        let parse = |prefix: &str| -> Option<usize> { name.strip_prefix(prefix)?.parse().ok() };
        if name == "pentagon" || name == "n5" {
            return Ok(pentagon());
        }
        if let Some(k) = parse("boolean") {
            return FiniteLattice::boolean(k as u32);
        }
        if let Some(k) = parse("chain") {
            return chain(k);
        }
        if let Some(k) = parse("diamond") {
            return diamond(k);
        }
        Err(Error::InvalidArgument(format!("unknown lattice name '{name}'")))
    }
}
