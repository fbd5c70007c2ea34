//! Polypermutohedra `Q(π; c)`, lowest posets of weight vectors, face location by
//! brute force, and comparison of the inner normal fan with a given fan.

use std::collections::{BTreeSet, HashMap};

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{guard, Error, Result};
use crate::fan::Fan;
use crate::linalg::{rat, Rational};
use crate::polymatroid::ProjectionMap;
use crate::subset::{self, Subset};

const MAX_TRANSVERSALS: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct Polypermutohedron {
    proj: ProjectionMap,
    c: Vec<i64>,
    vertices: Vec<Vec<i64>>,
    /// Ordered transversals with the index of the vertex each one produces.
    transversals: Vec<(Vec<usize>, usize)>,
}

/// `c = (1, 2, …, n)`.
pub fn default_c(n: usize) -> Vec<i64> {
    (1..=n as i64).collect()
}

pub fn polypermutohedron(proj: &ProjectionMap, c: &[i64]) -> Result<Polypermutohedron> {
    let n = proj.n();
    if c.len() != n || c.first().is_some_and(|&x| x < 0) || c.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadCSequence);
    }
    let count = (1..=n).product::<usize>() * proj.fiber_sizes().iter().product::<usize>();
    guard("ordered transversals", count, MAX_TRANSVERSALS)?;
    let m = proj.m();
    let mut raw: Vec<(Vec<usize>, Vec<i64>)> = Vec::with_capacity(count);
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        if prefix.len() == n {
            let mut v = vec![0i64; m];
            for (j, &s) in prefix.iter().enumerate() {
                v[s] += c[j];
            }
            raw.push((prefix, v));
            continue;
        }
        for i in (0..n).rev() {
            if prefix.iter().any(|&s| proj.fiber_of(s) == i) {
                continue;
            }
            for s in subset::elements(proj.fiber(i)).collect::<Vec<_>>().into_iter().rev() {
                let mut next = prefix.clone();
                next.push(s);
                stack.push(next);
            }
        }
    }
    let distinct: BTreeSet<Vec<i64>> = raw.iter().map(|(_, v)| v.clone()).collect();
    let vertices: Vec<Vec<i64>> = distinct.into_iter().collect();
    let index: HashMap<&Vec<i64>, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let transversals = raw.iter().map(|(s, v)| (s.clone(), index[v])).collect();
    Ok(Polypermutohedron { proj: proj.clone(), c: c.to_vec(), vertices, transversals })
}

impl Polypermutohedron {
    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    pub fn c(&self) -> &[i64] {
        &self.c
    }

    pub fn projection(&self) -> &ProjectionMap {
        &self.proj
    }

    pub fn transversals(&self) -> &[(Vec<usize>, usize)] {
        &self.transversals
    }

    fn value(&self, v: usize, w: &[Rational]) -> Rational {
        self.vertices[v].iter().zip(w).fold(rat(0), |acc, (&x, y)| acc + rat(x) * y)
    }

    /// Vertices minimizing `⟨w, ·⟩`, by exhaustive evaluation.
    pub fn face(&self, w: &[Rational]) -> BTreeSet<usize> {
        let values: Vec<Rational> = (0..self.vertices.len()).map(|v| self.value(v, w)).collect();
        let Some(best) = values.iter().min() else { return BTreeSet::new() };
        values.iter().enumerate().filter(|(_, x)| *x == best).map(|(i, _)| i).collect()
    }
}

/// Per-fibre minima of `w` with the order induced by `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowestPoset {
    pub elements: Subset,
    /// Pairs `(i, j)` with `w_i ≤ w_j`.
    pub order: BTreeSet<(usize, usize)>,
}

pub fn lowest_poset(proj: &ProjectionMap, w: &[Rational]) -> LowestPoset {
    assert_eq!(w.len(), proj.m());
    let mut elements = 0;
    for i in 0..proj.n() {
        let fiber = proj.fiber(i);
        let min = subset::elements(fiber).map(|e| &w[e]).min().expect("fibres are nonempty");
        for e in subset::elements(fiber) {
            if w[e] == *min {
                elements |= 1 << e;
            }
        }
    }
    let order = subset::elements(elements)
        .flat_map(|i| subset::elements(elements).map(move |j| (i, j)))
        .filter(|&(i, j)| w[i] <= w[j])
        .collect();
    LowestPoset { elements, order }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minimizers {
    pub value: Rational,
    /// Exhaustive argmin.
    pub brute_force: BTreeSet<usize>,
    /// Vertices of transversals whose entries are fibre minima with weights
    /// non-increasing along the transversal.
    pub predicate: BTreeSet<usize>,
}

impl Minimizers {
    pub fn agree(&self) -> bool {
        self.brute_force == self.predicate
    }
}

pub fn minimizing_vertices(q: &Polypermutohedron, w: &[Rational]) -> Minimizers {
    let brute_force = q.face(w);
    let value = brute_force.iter().next().map_or(rat(0), |&v| q.value(v, w));
    let low = lowest_poset(&q.proj, w);
    let predicate = q
        .transversals
        .iter()
        .filter(|(s, _)| {
            s.iter().all(|&e| subset::contains(low.elements, e)) && s.windows(2).all(|p| w[p[0]] >= w[p[1]])
        })
        .map(|&(_, v)| v)
        .collect();
    Minimizers { value, brute_force, predicate }
}

fn lift_point(w: &[Rational]) -> Vec<Rational> {
    let mut v = w.to_vec();
    v.push(rat(0));
    v
}

/// Does `fan` equal the inner normal fan of `q`? Every cone must select its own face of
/// `q` and its own lowest poset, maximal cones must select single vertices covering all
/// vertices, and random points must select the face and poset of the cone containing them.
pub fn normal_fan_equals(q: &Polypermutohedron, fan: &Fan, trials: usize, seed: u64) -> Result<bool> {
    let m = q.proj.m();
    if fan.ambient_dim() + 1 != m {
        return Err(Error::AmbientMismatch(fan.ambient_dim() + 1, m));
    }
    let barycenter = |cone: &[usize]| -> Vec<Rational> {
        let mut w = vec![rat(0); m - 1];
        for &r in cone {
            for (x, &y) in w.iter_mut().zip(&fan.rays()[r]) {
                *x += rat(y);
            }
        }
        lift_point(&w)
    };
    let mut faces: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut posets: HashMap<(Subset, Vec<(usize, usize)>), usize> = HashMap::new();
    let mut per_cone = Vec::with_capacity(fan.cones().len());
    for (k, cone) in fan.cones().iter().enumerate() {
        let w = barycenter(cone);
        let face = q.face(&w);
        let low = lowest_poset(&q.proj, &w);
        if faces.insert(face.clone(), k).is_some() {
            return Ok(false);
        }
        if posets.insert((low.elements, low.order.iter().copied().collect()), k).is_some() {
            return Ok(false);
        }
        per_cone.push((face, low));
    }
    let mut hit = BTreeSet::new();
    for cone in fan.maximal_cones() {
        let face = q.face(&barycenter(cone));
        if face.len() != 1 {
            return Ok(false);
        }
        hit.extend(face);
    }
    if hit.len() != q.vertices.len() {
        return Ok(false);
    }
    let cone_pos: HashMap<&Vec<usize>, usize> = fan.cones().iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let w: Vec<Rational> = (0..m - 1).map(|_| rat(rng.gen_range(-6..=6))).collect();
        let Some(cone) = fan.find_cone(&w) else { return Ok(false) };
        let (face, low) = &per_cone[cone_pos[&cone]];
        let full = lift_point(&w);
        if q.face(&full) != *face || lowest_poset(&q.proj, &full) != *low {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Σ_{G ∈ G̃} min_{i ∈ G} w_i`.
pub fn nestohedron_support(members: &[Subset], w: &[Rational]) -> Rational {
    members.iter().fold(Rational::zero(), |acc, &g| {
        acc + subset::elements(g).map(|i| &w[i]).min().expect("members are nonempty").clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::{lifted_building_set, BuildingSet};
    use crate::fan::boolean_bergman_fan;
    use crate::polymatroid::Polymatroid;

    fn proj(sizes: &[usize]) -> ProjectionMap {
        ProjectionMap::new(sizes.to_vec()).unwrap()
    }

    fn rv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn vertex_examples() {
        let q = polypermutohedron(&proj(&[1, 1]), &[1, 2]).unwrap();
        assert_eq!(q.vertices(), &[vec![1, 2], vec![2, 1]]);
        let q = polypermutohedron(&proj(&[2]), &[1]).unwrap();
        assert_eq!(q.vertices(), &[vec![0, 1], vec![1, 0]]);
        let q = polypermutohedron(&proj(&[1, 2]), &[1, 2]).unwrap();
        let got: BTreeSet<Vec<i64>> = q.vertices().iter().cloned().collect();
        let want: BTreeSet<Vec<i64>> =
            [vec![1, 2, 0], vec![2, 1, 0], vec![1, 0, 2], vec![2, 0, 1]].into_iter().collect();
        assert_eq!(got, want);
        assert_eq!(q.transversals().len(), 4);
        assert!(polypermutohedron(&proj(&[1, 2]), &[2, 2]).is_err());
        assert!(polypermutohedron(&proj(&[1, 2]), &[-1, 2]).is_err());
        assert!(polypermutohedron(&proj(&[1, 2]), &[1]).is_err());
    }

    #[test]
    fn vertices_distinct_for_increasing_c() {
        for sizes in [vec![1, 2], vec![2, 2], vec![1, 1, 2], vec![3, 1]] {
            let p = proj(&sizes);
            let q = polypermutohedron(&p, &[1, 3, 4, 9][..sizes.len()]).unwrap();
            assert_eq!(q.vertices().len(), q.transversals().len());
        }
        // c_1 = 0 forgets which element of a fibre fills the first slot
        let q = polypermutohedron(&proj(&[2, 1]), &[0, 1]).unwrap();
        assert_eq!(q.transversals().len(), 4);
        assert_eq!(q.vertices().len(), 3);
    }

    #[test]
    fn lowest_examples() {
        let p = proj(&[1, 2]);
        let low = lowest_poset(&p, &rv(&[3, 3, 3]));
        assert_eq!(low.elements, 0b111);
        assert_eq!(low.order.len(), 9);
        let low = lowest_poset(&p, &rv(&[0, 1, 2]));
        assert_eq!(low.elements, 0b011);
        assert!(low.order.contains(&(0, 1)) && !low.order.contains(&(1, 0)));
        assert_eq!(lowest_poset(&p, &rv(&[5, 6, 7])), low);
    }

    #[test]
    fn minimizer_examples() {
        let q = polypermutohedron(&proj(&[1, 2]), &[1, 2]).unwrap();
        let r = minimizing_vertices(&q, &rv(&[0, 1, 2]));
        assert_eq!(r.value, rat(1));
        assert_eq!(r.brute_force.len(), 1);
        assert_eq!(q.vertices()[*r.brute_force.iter().next().unwrap()], vec![2, 1, 0]);
        assert!(r.agree());
        let r = minimizing_vertices(&q, &rv(&[4, 4, 4]));
        assert_eq!(r.brute_force.len(), 4);
        assert!(r.agree());
        // w = -e_{fibre 1}: large c goes into the fibre
        let r = minimizing_vertices(&q, &rv(&[0, -1, -1]));
        for &v in &r.brute_force {
            assert_eq!(q.vertices()[v][0], 1);
        }
        assert!(r.agree());
    }

    #[test]
    fn predicate_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for sizes in [vec![1, 2], vec![2, 2], vec![1, 1, 2], vec![3, 2]] {
            let q = polypermutohedron(&proj(&sizes), &default_c(sizes.len())).unwrap();
            for _ in 0..200 {
                let w: Vec<Rational> = (0..q.projection().m()).map(|_| rat(rng.gen_range(-3..=3))).collect();
                assert!(minimizing_vertices(&q, &w).agree(), "{sizes:?} {w:?}");
            }
        }
    }

    #[test]
    fn normal_fans() {
        for sizes in [vec![1, 1], vec![2], vec![1, 2], vec![2, 2], vec![1, 1, 1]] {
            let p = proj(&sizes);
            let q = polypermutohedron(&p, &default_c(sizes.len())).unwrap();
            let fan = boolean_bergman_fan(&p).unwrap();
            assert!(normal_fan_equals(&q, &fan, 100, 5).unwrap(), "{sizes:?}");
        }
        let q = polypermutohedron(&proj(&[1, 2]), &[1, 2]).unwrap();
        let other = boolean_bergman_fan(&proj(&[2, 1])).unwrap();
        assert!(!normal_fan_equals(&q, &other, 100, 5).unwrap());
        let small = boolean_bergman_fan(&proj(&[1, 1])).unwrap();
        assert!(normal_fan_equals(&q, &small, 10, 5).is_err());
    }

    #[test]
    fn support_function() {
        let members = [0b01, 0b10, 0b11];
        assert_eq!(nestohedron_support(&members, &rv(&[1, 0])), rat(1));
        assert_eq!(nestohedron_support(&members, &rv(&[3, 3])), rat(9));
        let p = Polymatroid::new(vec![0, 2, 2, 3]).unwrap();
        let l = lifted_building_set(&BuildingSet::maximal(&p)).unwrap();
        let g = l.building.members();
        for &s in g {
            let w: Vec<Rational> = (0..4).map(|i| rat(i64::from(subset::contains(s, i)))).collect();
            let below = g.iter().filter(|&&h| subset::is_subset(h, s)).count() as i64;
            assert_eq!(nestohedron_support(g, &w), rat(below));
        }
        // equivariance and homogeneity
        let w = rv(&[2, -1, 5, 0]);
        let shifted: Vec<Rational> = w.iter().map(|x| x + rat(3)).collect();
        assert_eq!(nestohedron_support(g, &shifted), nestohedron_support(g, &w) + rat(3 * g.len() as i64));
        let scaled: Vec<Rational> = w.iter().map(|x| x * rat(4)).collect();
        assert_eq!(nestohedron_support(g, &scaled), nestohedron_support(g, &w) * rat(4));
    }
}
