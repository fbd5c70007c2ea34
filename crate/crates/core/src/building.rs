//! Building sets of flats, their geometric validation, the lifted building set on the
//! multisymmetric lift, and nested-set complexes.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::lift::MultisymMatroid;
use crate::polymatroid::Polymatroid;
use crate::subset::{self, Subset};

/// Default cap on the number of nested sets enumerated.
pub const DEFAULT_MAX_CELLS: usize = 200_000;

/// A nested set, members listed in canonical order.
pub type NestedSet = Vec<Subset>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildingSet {
    base: Polymatroid,
    members: Vec<Subset>,
    lookup: HashSet<Subset>,
}

/// Why a building set fails to be geometric at some flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    RankSum { expected: u32, actual: u32 },
    NotIsomorphic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub failure: Option<(Subset, Failure)>,
}

impl Certificate {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => f.write_str("geometric building set"),
            Some((flat, Failure::RankSum { expected, actual })) => write!(
                f,
                "rank sum over maximal members below {flat:#b} is {actual}, expected {expected}"
            ),
            Some((flat, Failure::NotIsomorphic)) => {
                write!(f, "product of intervals is not isomorphic to the interval below {flat:#b}")
            }
        }
    }
}

impl BuildingSet {
    pub fn new(base: Polymatroid, members: impl IntoIterator<Item = Subset>) -> Result<Self> {
        let mut members: Vec<Subset> = members.into_iter().collect();
        subset::sort_canonical(&mut members);
        members.dedup();
        for &g in &members {
            if g == 0 {
                return Err(Error::EmptyMember(g));
            }
            if !subset::is_subset(g, base.ground()) || !base.is_flat(g) {
                return Err(Error::NotAFlat(g));
            }
        }
        if base.n() > 0 && !members.contains(&base.ground()) {
            return Err(Error::MissingGround);
        }
        let lookup = members.iter().copied().collect();
        Ok(BuildingSet { base, members, lookup })
    }

    /// All nonempty flats.
    pub fn maximal(base: &Polymatroid) -> Self {
        let flats = base.flat_lattice().flats().iter().copied().filter(|&f| f != 0).collect::<Vec<_>>();
        BuildingSet::new(base.clone(), flats).expect("nonempty flats form a building set")
    }

    pub fn base(&self) -> &Polymatroid {
        &self.base
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.lookup.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `max G_{≤F}`: inclusion-maximal members contained in `f`.
    pub fn maximal_below(&self, f: Subset) -> Vec<Subset> {
        let below: Vec<Subset> = self.members.iter().copied().filter(|&g| subset::is_subset(g, f)).collect();
        below
            .iter()
            .copied()
            .filter(|&g| !below.iter().any(|&h| h != g && subset::is_subset(g, h)))
            .collect()
    }

    pub fn is_geometric_building_set(&self) -> Certificate {
        let lattice = self.base.flat_lattice();
        for &f in lattice.flats() {
            if f == 0 {
                continue;
            }
            let pieces = self.maximal_below(f);
            let actual: u32 = pieces.iter().map(|&g| self.base.rank(g)).sum();
            let expected = self.base.rank(f);
            if actual != expected {
                return Certificate { failure: Some((f, Failure::RankSum { expected, actual })) };
            }
            // a single piece of full rank is `f` itself and the map is the identity
            if pieces.len() > 1 && !self.product_isomorphic(&lattice.below(f), &pieces, |g| lattice.below(g)) {
                return Certificate { failure: Some((f, Failure::NotIsomorphic)) };
            }
        }
        Certificate { failure: None }
    }

    fn product_isomorphic(
        &self,
        interval: &[Subset],
        pieces: &[Subset],
        below: impl Fn(Subset) -> Vec<Subset>,
    ) -> bool {
        let factors: Vec<Vec<Subset>> = pieces.iter().map(|&g| below(g)).collect();
        let total: usize = factors.iter().map(Vec::len).product();
        if total != interval.len() {
            return false;
        }
        let mut tuples: Vec<Vec<Subset>> = vec![Vec::new()];
        for factor in &factors {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    factor.iter().map(move |&h| {
                        let mut t = t.clone();
                        t.push(h);
                        t
                    })
                })
                .collect();
        }
        let joins: Vec<Subset> = tuples
            .iter()
            .map(|t| self.base.closure(t.iter().fold(0, |acc, &h| acc | h)))
            .collect();
        let distinct: HashSet<Subset> = joins.iter().copied().collect();
        if distinct.len() != total {
            return false;
        }
        for (s, &js) in tuples.iter().zip(&joins) {
            for (t, &jt) in tuples.iter().zip(&joins) {
                let componentwise = s.iter().zip(t).all(|(&a, &b)| subset::is_subset(a, b));
                if componentwise != subset::is_subset(js, jt) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff every pairwise-incomparable subfamily of size at least two has the
    /// closure of its union outside the building set.
    pub fn is_nested(&self, family: &[Subset]) -> bool {
        let k = family.len();
        assert!(k < 32, "nested family too large");
        for sel in 0u32..1 << k {
            if sel.count_ones() < 2 {
                continue;
            }
            let chosen: Vec<Subset> = subset::elements(sel).map(|i| family[i]).collect();
            let antichain = chosen.iter().enumerate().all(|(i, &a)| {
                chosen[i + 1..].iter().all(|&b| !subset::is_subset(a, b) && !subset::is_subset(b, a))
            });
            if antichain && self.contains(self.base.closure(chosen.iter().fold(0, |acc, &g| acc | g))) {
                return false;
            }
        }
        true
    }

    /// All nested sets, including the empty one, ordered by size and then by the
    /// canonical positions of their members.
    pub fn nested_complex(&self, max_cells: usize) -> Result<Vec<NestedSet>> {
        let memo: RefCell<HashMap<Subset, bool>> = RefCell::new(HashMap::new());
        let union_is_member = |u: Subset| -> bool {
            if let Some(&b) = memo.borrow().get(&u) {
                return b;
            }
            let b = self.contains(self.base.closure(u));
            memo.borrow_mut().insert(u, b);
            b
        };
        // can `g` join the nested set `current` (given as indices)?
        let compatible = |current: &[usize], g: Subset| -> bool {
            let incomparable: Vec<Subset> = current
                .iter()
                .map(|&i| self.members[i])
                .filter(|&h| !subset::is_subset(h, g) && !subset::is_subset(g, h))
                .collect();
            let k = incomparable.len();
            (1u32..1 << k).all(|sel| {
                let chosen: Vec<Subset> = subset::elements(sel).map(|i| incomparable[i]).collect();
                let antichain = chosen.iter().enumerate().all(|(i, &a)| {
                    chosen[i + 1..].iter().all(|&b| !subset::is_subset(a, b) && !subset::is_subset(b, a))
                });
                !antichain || !union_is_member(chosen.iter().fold(g, |acc, &h| acc | h))
            })
        };

        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(current) = stack.pop() {
            out.push(current.clone());
            if out.len() > max_cells {
                return Err(Error::SizeGuard { what: "nested sets", limit: max_cells, actual: out.len() });
            }
            let start = current.last().map_or(0, |&i| i + 1);
            for j in (start..self.members.len()).rev() {
                if compatible(&current, self.members[j]) {
                    let mut next = current.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
        }
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        Ok(out.into_iter().map(|ix| ix.into_iter().map(|i| self.members[i]).collect()).collect())
    }
}

/// The building set `{π⁻¹(G)} ∪ atoms` on the multisymmetric lift.
#[derive(Debug, Clone)]
pub struct LiftedBuildingSet {
    pub lift: MultisymMatroid,
    pub building: BuildingSet,
}

pub fn lifted_building_set(g: &BuildingSet) -> Result<LiftedBuildingSet> {
    let lift = MultisymMatroid::lift(g.base())?;
    let proj = lift.projection().clone();
    let mut members: Vec<Subset> = g.members().iter().map(|&m| proj.preimage(m)).collect();
    members.extend(lift.atoms());
    let building = BuildingSet::new(lift.as_polymatroid(), members)?;
    Ok(LiftedBuildingSet { lift, building })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(t: &[u32]) -> Polymatroid {
        Polymatroid::new(t.to_vec()).unwrap()
    }

    fn fixtures() -> Vec<Polymatroid> {
        vec![
            pm(&[0, 2]),
            pm(&[0, 1, 2, 2]),
            pm(&[0, 2, 2, 3]),
            pm(&[0, 1, 1, 2]),
            pm(&[0, 2, 1, 2]),
            pm(&[0, 1, 1, 1, 1, 2, 2, 2]),
            pm(&[0, 1, 1, 2, 1, 2, 2, 3]),
            pm(&[0, 1, 2, 2, 2, 2, 3, 3]),
        ]
    }

    #[test]
    fn construction_errors() {
        let p = pm(&[0, 1, 2, 2]);
        assert_eq!(BuildingSet::new(p.clone(), [0b01]).unwrap_err(), Error::MissingGround);
        assert_eq!(BuildingSet::new(p.clone(), [0, 0b11]).unwrap_err(), Error::EmptyMember(0));
        let q = pm(&[0, 1, 1, 1]);
        assert_eq!(BuildingSet::new(q, [0b01, 0b11]).unwrap_err(), Error::NotAFlat(0b01));
    }

    #[test]
    fn geometric_examples() {
        for p in fixtures() {
            assert!(BuildingSet::maximal(&p).is_geometric_building_set().is_ok());
        }
        let p = pm(&[0, 1, 2, 2]);
        let cert = BuildingSet::new(p, [0b11]).unwrap().is_geometric_building_set();
        assert_eq!(cert.failure, Some((0b01, Failure::RankSum { expected: 1, actual: 0 })));
        assert!(BuildingSet::new(pm(&[0, 2]), [1]).unwrap().is_geometric_building_set().is_ok());
        // Boolean on two elements with only the atoms and the top
        let b = pm(&[0, 1, 1, 2]);
        assert!(BuildingSet::new(b, [0b01, 0b10, 0b11]).unwrap().is_geometric_building_set().is_ok());
    }

    #[test]
    fn product_map_check() {
        let below = |p: &Polymatroid| {
            let l = p.flat_lattice();
            move |g: Subset| l.below(g)
        };
        // two points of U_{2,3} generate four flats, the interval below E has five
        let u = pm(&[0, 1, 1, 2, 1, 2, 2, 2]);
        let g = BuildingSet::maximal(&u);
        let interval = u.flat_lattice().below(0b111);
        assert!(!g.product_isomorphic(&interval, &[0b001, 0b010], below(&u)));
        let b = pm(&[0, 1, 1, 2]);
        let g = BuildingSet::maximal(&b);
        let interval = b.flat_lattice().below(0b11);
        assert!(g.product_isomorphic(&interval, &[0b01, 0b10], below(&b)));
    }

    #[test]
    fn lifted_examples() {
        let l = lifted_building_set(&BuildingSet::maximal(&pm(&[0, 1, 2, 2]))).unwrap();
        assert_eq!(l.building.members(), &[0b001, 0b010, 0b100, 0b111]);
        let l = lifted_building_set(&BuildingSet::new(pm(&[0, 2]), [1]).unwrap()).unwrap();
        assert_eq!(l.building.members(), &[0b01, 0b10, 0b11]);
        let l = lifted_building_set(&BuildingSet::maximal(&pm(&[0, 1, 1, 2]))).unwrap();
        assert_eq!(l.building.members(), &[0b01, 0b10, 0b11]);
        for p in fixtures() {
            let l = lifted_building_set(&BuildingSet::maximal(&p)).unwrap();
            assert!(l.building.is_geometric_building_set().is_ok());
            assert!(l.building.contains(l.lift.ground()));
        }
    }

    #[test]
    fn nested_examples() {
        let l = lifted_building_set(&BuildingSet::new(pm(&[0, 2]), [1]).unwrap()).unwrap();
        assert!(!l.building.is_nested(&[0b01, 0b10]));
        let complex = l.building.nested_complex(DEFAULT_MAX_CELLS).unwrap();
        let expected: Vec<NestedSet> =
            vec![vec![], vec![0b01], vec![0b10], vec![0b11], vec![0b01, 0b11], vec![0b10, 0b11]];
        assert_eq!(complex, expected);
        let g = BuildingSet::maximal(&pm(&[0, 1, 2, 2]));
        assert!(g.is_nested(&[0b01, 0b11]));
        assert!(g.nested_complex(1).is_err());
    }

    fn flags(lattice_flats: &[Subset]) -> HashSet<NestedSet> {
        let nonempty: Vec<Subset> = lattice_flats.iter().copied().filter(|&f| f != 0).collect();
        let mut out = HashSet::new();
        for sel in 0u32..1 << nonempty.len() {
            let chosen: Vec<Subset> = subset::elements(sel).map(|i| nonempty[i]).collect();
            let chain = chosen.iter().all(|&a| chosen.iter().all(|&b| subset::is_subset(a, b) || subset::is_subset(b, a)));
            if chain {
                out.insert(chosen);
            }
        }
        out
    }

    #[test]
    fn maximal_nested_sets_are_flags() {
        for p in fixtures() {
            let g = BuildingSet::maximal(&p);
            let complex: HashSet<NestedSet> = g.nested_complex(DEFAULT_MAX_CELLS).unwrap().into_iter().collect();
            assert_eq!(complex, flags(p.flat_lattice().flats()));
        }
    }

    #[test]
    fn complex_is_simplicial_and_matches_predicate() {
        for p in fixtures() {
            let l = lifted_building_set(&BuildingSet::maximal(&p)).unwrap();
            for b in [BuildingSet::maximal(&p), l.building.clone()] {
                let complex = b.nested_complex(DEFAULT_MAX_CELLS).unwrap();
                let set: HashSet<NestedSet> = complex.iter().cloned().collect();
                assert_eq!(set.len(), complex.len());
                for n in &complex {
                    assert!(b.is_nested(n));
                    for sel in 0u32..1 << n.len() {
                        let face: NestedSet = subset::elements(sel).map(|i| n[i]).collect();
                        assert!(set.contains(&face));
                    }
                }
                for &g in b.members() {
                    assert!(set.contains(&vec![g]));
                }
            }
        }
    }

    #[test]
    fn nested_round_trip_through_lift() {
        for p in fixtures() {
            let g = BuildingSet::maximal(&p);
            let l = lifted_building_set(&g).unwrap();
            let proj = l.lift.projection().clone();
            let members = g.members();
            assert!(members.len() <= 12);
            for sel in 0u32..1 << members.len() {
                let n: Vec<Subset> = subset::elements(sel).map(|i| members[i]).collect();
                let lifted: Vec<Subset> = n.iter().map(|&f| proj.preimage(f)).collect();
                assert_eq!(g.is_nested(&n), l.building.is_nested(&lifted), "{n:?}");
            }
        }
    }

    #[test]
    fn maximal_members_partition_rank() {
        for p in fixtures() {
            let l = lifted_building_set(&BuildingSet::maximal(&p)).unwrap();
            let b = &l.building;
            for &f in b.base().flat_lattice().flats() {
                let pieces = b.maximal_below(f);
                for (i, &a) in pieces.iter().enumerate() {
                    for &c in &pieces[i + 1..] {
                        assert!(!subset::is_subset(a, c) && !subset::is_subset(c, a));
                    }
                }
                let s: u32 = pieces.iter().map(|&g| b.base().rank(g)).sum();
                assert_eq!(s, b.base().rank(f));
            }
        }
    }
}
