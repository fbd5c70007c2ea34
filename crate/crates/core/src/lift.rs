//! The minimal multisymmetric lift of a polymatroid.
//!
//! The lift is a matroid on `Ẽ = Ẽ_1 ⊔ … ⊔ Ẽ_n` with `|Ẽ_i| = rk(i)`, whose rank is
//!
//! ```text
//! rk(S) = min { rk_P(A) + |S ∖ π⁻¹(A)| : A ⊆ E }.
//! ```
//!
//! The symmetry group (a product of symmetric groups on the fibres) never appears
//! explicitly: orbits only depend on per-fibre counts, so everything reduces to
//! fibre-wise mask operations.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::polymatroid::{FlatLattice, Polymatroid, ProjectionMap};
use crate::subset::{self, Subset};

pub struct MultisymMatroid {
    proj: ProjectionMap,
    base: Polymatroid,
    total_rank: u32,
    memo: RwLock<HashMap<Subset, u32>>,
}

impl fmt::Debug for MultisymMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultisymMatroid")
            .field("fibers", &self.proj.fiber_sizes())
            .field("base", &self.base)
            .finish()
    }
}

impl Clone for MultisymMatroid {
    fn clone(&self) -> Self {
        MultisymMatroid {
            proj: self.proj.clone(),
            base: self.base.clone(),
            total_rank: self.total_rank,
            memo: RwLock::new(self.memo.read().unwrap().clone()),
        }
    }
}

/// Geometric flats of the lift together with the comparison against `L_P`.
#[derive(Debug, Clone)]
pub struct GeometricFlats {
    /// Geometric flats of the lift, as subsets of `Ẽ`.
    pub lattice: FlatLattice,
    /// Flats of the base polymatroid.
    pub base_lattice: FlatLattice,
    /// `F ↦ π⁻¹(F)` is an order isomorphism `L_P → L_M^Γ`.
    pub isomorphic: bool,
    /// Geometric flats are closed under the join and meet of `L_M`.
    pub sublattice: bool,
}

impl MultisymMatroid {
    pub fn lift(base: &Polymatroid) -> Result<Self> {
        let proj = base.projection()?;
        Ok(MultisymMatroid {
            proj,
            base: base.clone(),
            total_rank: base.total_rank(),
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn projection(&self) -> &ProjectionMap {
        &self.proj
    }

    pub fn base(&self) -> &Polymatroid {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.proj.m()
    }

    pub fn ground(&self) -> Subset {
        self.proj.ground()
    }

    pub fn total_rank(&self) -> u32 {
        self.total_rank
    }

    /// The min-formula, evaluated over the `2^n` subsets of `E`.
    pub fn rank_uncached(&self, s: Subset) -> u32 {
        let counts: Vec<u32> = (0..self.proj.n())
            .map(|i| (s & self.proj.fiber(i)).count_ones())
            .collect();
        let outside_all: u32 = counts.iter().sum();
        (0..1u32 << self.proj.n())
            .map(|a| {
                let inside: u32 = subset::elements(a).map(|i| counts[i]).sum();
                self.base.rank(a) + outside_all - inside
            })
            .min()
            .unwrap_or(0)
    }

    pub fn rank(&self, s: Subset) -> u32 {
        if let Some(&r) = self.memo.read().unwrap().get(&s) {
            return r;
        }
        let r = self.rank_uncached(s);
        self.memo.write().unwrap().insert(s, r);
        r
    }

    /// Union of the fibres entirely contained in `s`.
    pub fn geometric_part(&self, s: Subset) -> Subset {
        self.proj.geometric_part(s)
    }

    pub fn is_geometric(&self, s: Subset) -> bool {
        self.geometric_part(s) == s
    }

    pub fn closure(&self, s: Subset) -> Subset {
        let r = self.rank(s);
        (0..self.m()).fold(s, |acc, e| {
            if !subset::contains(s, e) && self.rank(s | 1 << e) == r {
                acc | 1 << e
            } else {
                acc
            }
        })
    }

    /// All flats, reached from `cl(∅)` by repeatedly closing `F ∪ {e}`.
    pub fn flats(&self) -> Vec<Subset> {
        let start = self.closure(0);
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            for e in 0..self.m() {
                if !subset::contains(f, e) {
                    let g = self.closure(f | 1 << e);
                    if seen.insert(g) {
                        queue.push_back(g);
                    }
                }
            }
        }
        let mut v: Vec<_> = seen.into_iter().collect();
        subset::sort_canonical(&mut v);
        v
    }

    pub fn flat_lattice(&self) -> FlatLattice {
        FlatLattice::from_flats(self.flats(), self.ground())
    }

    /// Rank-one flats.
    pub fn atoms(&self) -> Vec<Subset> {
        let mut v: Vec<_> = (0..self.m()).map(|e| self.closure(1 << e)).collect();
        subset::sort_canonical(&mut v);
        v.dedup();
        v
    }

    /// The lift as a matroid with an explicit rank table on `Ẽ`.
    pub fn as_polymatroid(&self) -> Polymatroid {
        let table = (0..1u32 << self.m()).map(|s| self.rank(s)).collect();
        Polymatroid::new(table).expect("lift rank is a matroid rank function")
    }

    pub fn geometric_flat_lattice(&self) -> Result<GeometricFlats> {
        let base_lattice = self.base.flat_lattice();
        let lattice_m = self.flat_lattice();
        for &f in base_lattice.flats() {
            let pre = self.proj.preimage(f);
            if !lattice_m.contains(pre) {
                return Err(Error::Inconsistent(format!(
                    "preimage {pre:#b} of flat {f:#b} is not a flat of the lift"
                )));
            }
        }
        let geo: Vec<Subset> = lattice_m
            .flats()
            .iter()
            .copied()
            .filter(|&f| self.is_geometric(f))
            .collect();
        let lattice = FlatLattice::from_flats(geo, self.ground());
        let isomorphic = base_lattice.is_isomorphic_via(&lattice, |f| self.proj.preimage(f));
        let sublattice = lattice.flats().iter().all(|&a| {
            lattice.flats().iter().all(|&b| {
                lattice.contains(a & b) && lattice.contains(self.closure(a | b))
            })
        });
        Ok(GeometricFlats { lattice, base_lattice, isomorphic, sublattice })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lift(t: &[u32]) -> MultisymMatroid {
        MultisymMatroid::lift(&Polymatroid::new(t.to_vec()).unwrap()).unwrap()
    }

    fn uniform(k: u32, m: usize) -> Vec<u32> {
        (0..1u32 << m).map(|s| s.count_ones().min(k)).collect()
    }

    #[test]
    fn lift_rank_examples() {
        let m = lift(&[0, 1, 2, 2]);
        assert_eq!(m.rank(0), 0);
        assert_eq!(m.rank(0b110), 2);
        // Γ-stable sets get the base rank
        for a in 0..4 {
            assert_eq!(m.rank(m.projection().preimage(a)), m.base().rank(a));
        }
    }

    #[test]
    fn lifts_are_uniform() {
        assert_eq!(lift(&[0, 1, 2, 2]).as_polymatroid().rank_table(), &uniform(2, 3)[..]);
        assert_eq!(lift(&[0, 2, 2, 3]).as_polymatroid().rank_table(), &uniform(3, 4)[..]);
        let u = uniform(2, 3);
        assert_eq!(lift(&u).as_polymatroid().rank_table(), &u[..]);
    }

    #[test]
    fn geometric_part_examples() {
        let m = lift(&[0, 1, 2, 2]);
        assert_eq!(m.geometric_part(0b111), 0b111);
        assert_eq!(m.geometric_part(0b011), 0b001);
        assert_eq!(m.geometric_part(0b010), 0);
        for a in 0..4 {
            let s = m.projection().preimage(a);
            assert_eq!(m.geometric_part(s), s);
        }
    }

    #[test]
    fn closure_in_lift() {
        let m = lift(&[0, 1, 2, 2]);
        assert_eq!(m.closure(0b011), 0b111);
        assert_eq!(m.closure(0), 0);
        let m = lift(&[0, 2, 2, 3, 1, 3, 3, 4]);
        for s in 0..1u32 << m.m() {
            let c = m.closure(s);
            if m.is_geometric(s) {
                assert!(m.is_geometric(c));
            }
            for i in 0..m.projection().n() {
                let fib = m.projection().fiber(i);
                assert!(c & fib == fib || c & fib == s & fib);
            }
        }
    }

    #[test]
    fn geometric_flats_examples() {
        let g = lift(&[0, 1, 2, 2]).geometric_flat_lattice().unwrap();
        assert_eq!(g.lattice.flats(), &[0, 0b001, 0b111]);
        assert!(g.isomorphic && g.sublattice);

        let pr = ProjectionMap::new(vec![2, 1, 2]).unwrap();
        let b = Polymatroid::boolean(&pr);
        let g = MultisymMatroid::lift(&b).unwrap().geometric_flat_lattice().unwrap();
        assert_eq!(g.lattice.len(), 8);
        for a in 0..8 {
            assert!(g.lattice.contains(pr.preimage(a)));
        }
    }

    #[test]
    fn flat_rank_splits_into_geometric_part() {
        let m = lift(&[0, 2, 2, 3]);
        for f in m.flats() {
            let geo = m.geometric_part(f);
            assert_eq!(m.rank(f), m.rank(geo) + subset::size(f & !geo) as u32);
        }
    }

    #[test]
    fn flats_by_closure_match_exhaustive_enumeration() {
        let m = lift(&[0, 2, 1, 3, 2, 3, 3, 4]);
        let table = m.as_polymatroid();
        assert_eq!(m.flat_lattice().flats(), table.flat_lattice().flats());
    }

    #[test]
    fn gamma_invariance_under_random_fiber_permutations() {
        let m = lift(&[0, 2, 2, 3, 2, 3, 3, 4]);
        let pr = m.projection().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut perm: Vec<usize> = (0..m.m()).collect();
            for i in 0..pr.n() {
                let mut block: Vec<usize> = subset::elements(pr.fiber(i)).collect();
                let orig = block.clone();
                block.shuffle(&mut rng);
                for (a, b) in orig.into_iter().zip(block) {
                    perm[a] = b;
                }
            }
            for s in 0..1u32 << m.m() {
                let t = subset::elements(s).fold(0, |acc, e| acc | 1 << perm[e]);
                assert_eq!(m.rank(s), m.rank(t));
            }
        }
    }

    #[test]
    fn lift_commutes_with_direct_sum() {
        let p1 = Polymatroid::new(vec![0, 1, 2, 2]).unwrap();
        let p2 = Polymatroid::new(vec![0, 2]).unwrap();
        let sum = MultisymMatroid::lift(&p1.direct_sum(&p2).unwrap()).unwrap();
        let l1 = MultisymMatroid::lift(&p1).unwrap().as_polymatroid();
        let l2 = MultisymMatroid::lift(&p2).unwrap().as_polymatroid();
        assert_eq!(sum.as_polymatroid(), l1.direct_sum(&l2).unwrap());
    }

    #[test]
    fn lift_commutes_with_restriction() {
        let p = Polymatroid::new(vec![0, 2, 2, 3, 1, 3, 3, 4]).unwrap();
        let m = MultisymMatroid::lift(&p).unwrap();
        let full = m.as_polymatroid();
        for &f in p.flat_lattice().flats() {
            let lhs = MultisymMatroid::lift(&p.restriction(f).unwrap()).unwrap().as_polymatroid();
            let rhs = full.restriction(m.projection().preimage(f)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    /// A multisymmetric matroid with the same stable-set ranks and fibre ranks is the lift:
    /// rebuild each flat's rank from its geometric part and compare.
    #[test]
    fn lift_is_determined_by_stable_set_ranks() {
        let p = Polymatroid::new(vec![0, 2, 2, 3, 1, 3, 3, 4]).unwrap();
        let m = MultisymMatroid::lift(&p).unwrap();
        let pr = m.projection();
        for i in 0..pr.n() {
            assert_eq!(m.rank(pr.fiber(i)) as usize, pr.fiber_size(i));
        }
        for f in m.flats() {
            let geo = m.geometric_part(f);
            let rebuilt = p.rank(pr.image(geo)) + subset::size(f & !geo) as u32;
            assert_eq!(rebuilt, m.rank(f));
        }
    }
}
