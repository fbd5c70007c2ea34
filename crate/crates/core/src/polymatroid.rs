//! Polymatroids given by explicit rank tables, their flats and lattice of flats.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{guard, Axiom, Error, Result};
use crate::subset::{self, Subset, MAX_GROUND};

/// A loopless polymatroid on `{0, …, n-1}` with a dense rank table indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polymatroid {
    n: usize,
    rank: Vec<u32>,
}

impl Polymatroid {
    /// Validates a rank table against normalization, monotonicity, submodularity and
    /// looplessness, in that order, reporting the first violation with a witness pair.
    pub fn new(rank: Vec<u32>) -> Result<Self> {
        let len = rank.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::TableLength(len));
        }
        let n = len.trailing_zeros() as usize;
        guard("ground set size", n, MAX_GROUND)?;
        if rank[0] != 0 {
            return Err(Error::Axiom { axiom: Axiom::Normalization, a: 0, b: 0 });
        }
        for a in 0..len as Subset {
            for i in 0..n {
                let b = a | 1 << i;
                if b != a && rank[a as usize] > rank[b as usize] {
                    return Err(Error::Axiom { axiom: Axiom::Monotonicity, a, b });
                }
            }
        }
        // Local diminishing returns at every A is equivalent to global submodularity.
        for a in 0..len as Subset {
            for i in 0..n {
                if subset::contains(a, i) {
                    continue;
                }
                for j in i + 1..n {
                    if subset::contains(a, j) {
                        continue;
                    }
                    let (ai, aj) = (a | 1 << i, a | 1 << j);
                    let lhs = rank[(ai | aj) as usize] + rank[a as usize];
                    if lhs > rank[ai as usize] + rank[aj as usize] {
                        return Err(Error::Axiom { axiom: Axiom::Submodularity, a: ai, b: aj });
                    }
                }
            }
        }
        for i in 0..n {
            if rank[1 << i] == 0 {
                return Err(Error::Axiom { axiom: Axiom::Looplessness, a: 1 << i, b: 1 << i });
            }
        }
        Ok(Polymatroid { n, rank })
    }

    /// The polymatroid on the empty ground set.
    pub fn empty() -> Self {
        Polymatroid { n: 0, rank: vec![0] }
    }

    /// Rank of `B(π)`: `A ↦ |π⁻¹(A)|`.
    pub fn boolean(proj: &ProjectionMap) -> Self {
        let n = proj.n();
        let rank = (0..1u32 << n)
            .map(|a| subset::elements(a).map(|i| proj.fiber_size(i) as u32).sum())
            .collect();
        Polymatroid { n, rank }
    }

    /// `rk(S) = rk₁(S ∩ E¹) + rk₂(S ∩ E²)`, with the elements of `other` placed after ours.
    pub fn direct_sum(&self, other: &Polymatroid) -> Result<Polymatroid> {
        let n = self.n + other.n;
        guard("ground set size", n, MAX_GROUND)?;
        let low = subset::full(self.n);
        let rank = (0..1u32 << n)
            .map(|s| self.rank(s & low) + other.rank(s >> self.n))
            .collect();
        Ok(Polymatroid { n, rank })
    }

    /// Restriction to a flat `F`, with the elements of `F` re-indexed in increasing order.
    pub fn restriction(&self, flat: Subset) -> Result<Polymatroid> {
        if flat & !self.ground() != 0 || !self.is_flat(flat) {
            return Err(Error::NotAFlat(flat));
        }
        let k = subset::size(flat);
        let rank = (0..1u32 << k)
            .map(|s| self.rank(subset::expand(s, flat)))
            .collect();
        Ok(Polymatroid { n: k, rank })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> Subset {
        subset::full(self.n)
    }

    #[inline]
    pub fn rank(&self, s: Subset) -> u32 {
        self.rank[s as usize]
    }

    /// `rk(E)`.
    pub fn total_rank(&self) -> u32 {
        self.rank(self.ground())
    }

    pub fn rank_table(&self) -> &[u32] {
        &self.rank
    }

    /// True when `rk(A) ≤ |A|` for all `A`.
    pub fn is_matroid(&self) -> bool {
        (0..self.rank.len()).all(|a| self.rank[a] as usize <= subset::size(a as Subset))
    }

    /// Rank is modular, `rk(A) = Σ_{i∈A} rk(i)`, i.e. this is `B(π)` for the fibres `rk(i)`.
    pub fn is_boolean(&self) -> bool {
        (0..self.rank.len() as Subset)
            .all(|a| self.rank(a) == subset::elements(a).map(|i| self.rank(1 << i)).sum::<u32>())
    }

    pub fn is_flat(&self, f: Subset) -> bool {
        let r = self.rank(f);
        (0..self.n).all(|i| subset::contains(f, i) || self.rank(f | 1 << i) > r)
    }

    /// Smallest flat containing `a`: `a` together with every element that does not raise its rank.
    pub fn closure(&self, a: Subset) -> Subset {
        let r = self.rank(a);
        (0..self.n).fold(a, |acc, i| if self.rank(a | 1 << i) == r { acc | 1 << i } else { acc })
    }

    pub fn flat_lattice(&self) -> FlatLattice {
        let flats = (0..self.rank.len() as Subset).filter(|&f| self.is_flat(f)).collect();
        FlatLattice::from_flats(flats, self.ground())
    }

    /// Fibre sizes `rk(i)` of the minimal lift.
    pub fn projection(&self) -> Result<ProjectionMap> {
        ProjectionMap::new((0..self.n).map(|i| self.rank(1 << i) as usize).collect())
    }
}

/// A finite lattice of subsets, closed under intersection, with bottom and top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatLattice {
    flats: Vec<Subset>,
    index: HashMap<Subset, usize>,
    top: Subset,
}

impl FlatLattice {
    /// `flats` must be closed under intersection and contain `top`.
    pub fn from_flats(mut flats: Vec<Subset>, top: Subset) -> Self {
        subset::sort_canonical(&mut flats);
        flats.dedup();
        let index = flats.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        FlatLattice { flats, index, top }
    }

    pub fn flats(&self) -> &[Subset] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn index_of(&self, f: Subset) -> Option<usize> {
        self.index.get(&f).copied()
    }

    pub fn contains(&self, f: Subset) -> bool {
        self.index.contains_key(&f)
    }

    pub fn bottom(&self) -> Subset {
        self.flats[0]
    }

    pub fn top(&self) -> Subset {
        self.top
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        subset::is_subset(self.flats[i], self.flats[j])
    }

    /// Meet is intersection.
    pub fn meet(&self, i: usize, j: usize) -> Option<usize> {
        self.index_of(self.flats[i] & self.flats[j])
    }

    /// Join: the smallest member containing both.
    pub fn join(&self, i: usize, j: usize) -> usize {
        let u = self.flats[i] | self.flats[j];
        let hull = self.hull(u);
        self.index[&hull]
    }

    /// Smallest member containing `s` (intersection of all members above it).
    pub fn hull(&self, s: Subset) -> Subset {
        self.flats
            .iter()
            .filter(|&&f| subset::is_subset(s, f))
            .fold(self.top, |acc, &f| acc & f)
    }

    pub fn atoms(&self) -> Vec<Subset> {
        let bottom = self.bottom();
        self.flats
            .iter()
            .copied()
            .filter(|&f| f != bottom)
            .filter(|&f| {
                !self
                    .flats
                    .iter()
                    .any(|&g| g != bottom && g != f && subset::is_subset(g, f))
            })
            .collect()
    }

    /// Members contained in `f`.
    pub fn below(&self, f: Subset) -> Vec<Subset> {
        self.flats.iter().copied().filter(|&g| subset::is_subset(g, f)).collect()
    }

    /// Checks that every intersection of two members is a member.
    pub fn is_meet_closed(&self) -> bool {
        self.flats
            .iter()
            .all(|&a| self.flats.iter().all(|&b| self.contains(a & b)))
    }

    /// True iff `map` sends the members of `self` bijectively onto the members of `other`
    /// and `F ⊆ G ⇔ map(F) ⊆ map(G)`.
    pub fn is_isomorphic_via(&self, other: &FlatLattice, map: impl Fn(Subset) -> Subset) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let image: Vec<Subset> = self.flats.iter().map(|&f| map(f)).collect();
        let mut seen = vec![false; other.len()];
        for &g in &image {
            match other.index_of(g) {
                Some(k) if !seen[k] => seen[k] = true,
                _ => return false,
            }
        }
        for (a, &fa) in self.flats.iter().zip(&image) {
            for (b, &fb) in self.flats.iter().zip(&image) {
                if subset::is_subset(*a, *b) != subset::is_subset(fa, fb) {
                    return false;
                }
            }
        }
        true
    }
}

/// The surjection `π: Ẽ → E`. Fibre `i` occupies a contiguous block of `Ẽ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProjectionMap {
    fiber_sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl ProjectionMap {
    pub fn new(fiber_sizes: Vec<usize>) -> Result<Self> {
        if let Some(i) = fiber_sizes.iter().position(|&s| s == 0) {
            return Err(Error::Projection(format!("fiber {i} is empty")));
        }
        let m: usize = fiber_sizes.iter().sum();
        guard("lifted ground set size", m, MAX_GROUND)?;
        let offsets = fiber_sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        Ok(ProjectionMap { fiber_sizes, offsets })
    }

    pub fn n(&self) -> usize {
        self.fiber_sizes.len()
    }

    /// `|Ẽ|`.
    pub fn m(&self) -> usize {
        self.fiber_sizes.iter().sum()
    }

    pub fn fiber_sizes(&self) -> &[usize] {
        &self.fiber_sizes
    }

    pub fn fiber_size(&self, i: usize) -> usize {
        self.fiber_sizes[i]
    }

    /// `Ẽ_i` as a mask on `Ẽ`.
    pub fn fiber(&self, i: usize) -> Subset {
        subset::full(self.fiber_sizes[i]) << self.offsets[i]
    }

    pub fn fiber_of(&self, e: usize) -> usize {
        self.offsets.partition_point(|&o| o <= e) - 1
    }

    /// `π⁻¹(A)`.
    pub fn preimage(&self, a: Subset) -> Subset {
        subset::elements(a).fold(0, |acc, i| acc | self.fiber(i))
    }

    /// `π(S)`.
    pub fn image(&self, s: Subset) -> Subset {
        (0..self.n()).fold(0, |acc, i| if s & self.fiber(i) != 0 { acc | 1 << i } else { acc })
    }

    pub fn ground(&self) -> Subset {
        subset::full(self.m())
    }

    /// Union of the fibres entirely contained in `s`.
    pub fn geometric_part(&self, s: Subset) -> Subset {
        (0..self.n()).fold(0, |acc, i| {
            let f = self.fiber(i);
            if s & f == f {
                acc | f
            } else {
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: &[u32]) -> Polymatroid {
        Polymatroid::new(t.to_vec()).unwrap()
    }

    /// Exhaustive pairwise submodularity, independent of the local check in `new`.
    fn submodular_all_pairs(t: &[u32]) -> bool {
        let len = t.len();
        (0..len).all(|a| (0..len).all(|b| t[a | b] + t[a & b] <= t[a] + t[b]))
    }

    #[test]
    fn boolean_fibers_one_two_is_valid() {
        let b = Polymatroid::boolean(&ProjectionMap::new(vec![1, 2]).unwrap());
        assert_eq!(b.rank_table(), &[0, 1, 2, 3]);
        assert!(Polymatroid::new(b.rank_table().to_vec()).is_ok());
    }

    #[test]
    fn submodularity_witness() {
        let err = Polymatroid::new(vec![0, 1, 1, 3]).unwrap_err();
        assert_eq!(err, Error::Axiom { axiom: Axiom::Submodularity, a: 0b01, b: 0b10 });
    }

    #[test]
    fn small_valid_table() {
        assert!(submodular_all_pairs(&[0, 1, 2, 2]));
        assert!(Polymatroid::new(vec![0, 1, 2, 2]).is_ok());
    }

    #[test]
    fn other_axiom_failures() {
        assert!(matches!(Polymatroid::new(vec![0, 1, 2]), Err(Error::TableLength(3))));
        assert!(matches!(
            Polymatroid::new(vec![1, 1]),
            Err(Error::Axiom { axiom: Axiom::Normalization, .. })
        ));
        assert!(matches!(
            Polymatroid::new(vec![0, 2, 2, 1]),
            Err(Error::Axiom { axiom: Axiom::Monotonicity, .. })
        ));
        assert!(matches!(
            Polymatroid::new(vec![0, 0, 1, 1]),
            Err(Error::Axiom { axiom: Axiom::Looplessness, a: 1, .. })
        ));
    }

    #[test]
    fn local_check_matches_exhaustive_check() {
        // every monotone normalized table on 2 elements with values ≤ 3
        for r1 in 0..4u32 {
            for r2 in 0..4 {
                for r3 in r1.max(r2)..5 {
                    let t = [0, r1, r2, r3];
                    let ok = Polymatroid::new(t.to_vec()).is_ok();
                    assert_eq!(ok, submodular_all_pairs(&t) && r1 > 0 && r2 > 0, "{t:?}");
                }
            }
        }
    }

    #[test]
    fn closure_examples() {
        let q = p(&[0, 1, 2, 2]);
        assert_eq!(q.closure(0), 0);
        assert_eq!(q.closure(0b10), 0b11);
        let b = Polymatroid::boolean(&ProjectionMap::new(vec![1, 2, 1]).unwrap());
        for a in 0..8 {
            assert_eq!(b.closure(a), a);
        }
    }

    #[test]
    fn flat_lattice_examples() {
        assert_eq!(p(&[0, 1, 2, 2]).flat_lattice().flats(), &[0, 0b01, 0b11]);
        assert_eq!(p(&[0, 2, 2, 3]).flat_lattice().flats(), &[0, 0b01, 0b10, 0b11]);
        for n in 1..=4 {
            let b = Polymatroid::boolean(&ProjectionMap::new(vec![1; n]).unwrap());
            assert_eq!(b.flat_lattice().len(), 1 << n);
        }
    }

    #[test]
    fn closure_properties() {
        let q = p(&[0, 2, 2, 3, 1, 3, 3, 3]);
        let lat = q.flat_lattice();
        for a in 0..8 {
            let c = q.closure(a);
            assert_eq!(q.closure(c), c);
            assert!(subset::is_subset(a, c));
            assert_eq!(q.rank(c), q.rank(a));
            assert!(lat.contains(c));
            for b in 0..8 {
                if subset::is_subset(a, b) {
                    assert!(subset::is_subset(c, q.closure(b)));
                }
            }
        }
        assert!(lat.is_meet_closed());
        for i in 0..lat.len() {
            for j in 0..lat.len() {
                let fij = lat.flats()[i] | lat.flats()[j];
                assert_eq!(lat.flats()[lat.join(i, j)], q.closure(fij));
            }
        }
    }

    #[test]
    fn restriction_examples() {
        let q = p(&[0, 1, 2, 2]);
        assert_eq!(q.restriction(0b11).unwrap(), q);
        assert_eq!(q.restriction(0b01).unwrap().rank_table(), &[0, 1]);
        assert_eq!(q.restriction(0b10), Err(Error::NotAFlat(0b10)));

        let q = p(&[0, 2, 2, 3]);
        let lat = q.flat_lattice();
        for &f in lat.flats() {
            let sub = q.restriction(f).unwrap().flat_lattice();
            let interval = FlatLattice::from_flats(lat.below(f), f);
            assert!(sub.is_isomorphic_via(&interval, |h| subset::expand(h, f)));
        }
    }

    #[test]
    fn direct_sum_examples() {
        let q = p(&[0, 1, 2, 2]);
        assert_eq!(q.direct_sum(&Polymatroid::empty()).unwrap(), q);
        let a = p(&[0, 1]);
        let b = p(&[0, 2]);
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.rank_table(), &[0, 1, 2, 3]);
        let (la, lb, ls) = (a.flat_lattice(), b.flat_lattice(), s.flat_lattice());
        assert_eq!(ls.len(), la.len() * lb.len());
        for &f in la.flats() {
            for &g in lb.flats() {
                assert!(ls.contains(f | g << a.n()));
            }
        }
    }

    #[test]
    fn boolean_examples() {
        let b = |f: Vec<usize>| Polymatroid::boolean(&ProjectionMap::new(f).unwrap());
        assert_eq!(b(vec![1, 1]).rank_table(), &[0, 1, 1, 2]);
        assert_eq!(b(vec![2]).rank_table(), &[0, 2]);
        assert_eq!(b(vec![1, 2]).rank_table(), &[0, 1, 2, 3]);
        let t = b(vec![2, 1, 3]);
        let r = t.rank_table();
        for x in 0..8usize {
            for y in 0..8usize {
                assert_eq!(r[x | y] + r[x & y], r[x] + r[y]);
            }
        }
    }

    #[test]
    fn projection_indexing() {
        let pr = ProjectionMap::new(vec![1, 2, 3]).unwrap();
        assert_eq!(pr.m(), 6);
        assert_eq!(pr.fiber(0), 0b000001);
        assert_eq!(pr.fiber(1), 0b000110);
        assert_eq!(pr.fiber(2), 0b111000);
        assert_eq!((0..6).map(|e| pr.fiber_of(e)).collect::<Vec<_>>(), vec![0, 1, 1, 2, 2, 2]);
        assert_eq!(pr.preimage(0b101), 0b111001);
        assert_eq!(pr.image(0b010010), 0b110);
        assert_eq!(pr.geometric_part(0b001111), 0b000111);
        assert_eq!(pr.geometric_part(0b011011), 0b000001);
        assert!(ProjectionMap::new(vec![1, 0]).is_err());
    }
}
