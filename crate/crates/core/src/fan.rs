//! Simplicial fans in `N = Z^Ẽ / Z·(1,…,1)`: Bergman fans built from nested sets, from
//! chains of flats, and for Boolean polymatroids, with structural checks and exact point
//! location.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

use num::{BigInt, Integer, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::building::{lifted_building_set, BuildingSet, DEFAULT_MAX_CELLS};
use crate::error::{guard, Error, Result};
use crate::linalg::{self, rat, IntMatrix, Rational, RationalMatrix};
use crate::polymatroid::{Polymatroid, ProjectionMap};
use crate::subset::{self, Subset};

pub type LatticeVector = Vec<i64>;

/// Representative of `e_S` in `Z^m / Z·1`: drop the last coordinate after subtracting
/// the last entry times the all-ones vector.
pub fn quotient_vector(m: usize, s: Subset) -> LatticeVector {
    let last = if m > 0 && subset::contains(s, m - 1) { 1 } else { 0 };
    (0..m.saturating_sub(1)).map(|j| i64::from(subset::contains(s, j)) - last).collect()
}

pub fn primitive(v: &[i64]) -> LatticeVector {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// A cone as a sorted list of ray indices.
pub type Cone = Vec<usize>;

#[derive(Debug, Clone)]
struct Frame {
    duals: Vec<Vec<i128>>,
    normals: Vec<Vec<i128>>,
}

#[derive(Debug, Clone)]
struct Locator {
    rows: Vec<usize>,
    inverse: RationalMatrix,
}

#[derive(Debug, Clone)]
pub struct Fan {
    ambient: usize,
    rays: Vec<LatticeVector>,
    labels: Vec<Subset>,
    cones: Vec<Cone>,
    maximal: Vec<Cone>,
    cone_index: HashMap<Cone, usize>,
    locators: OnceLock<Vec<Option<Locator>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FanJson {
    pub ambient_dim: usize,
    pub rays: Vec<LatticeVector>,
    pub ray_subsets: Vec<Subset>,
    pub cones: Vec<Cone>,
    pub maximal_cones: Vec<Cone>,
}

/// Results of the structural validators.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FanReport {
    pub simplicial: bool,
    pub unimodular: bool,
    pub face_closed: bool,
    pub proper_intersections: bool,
    pub pure: bool,
    pub dimension: usize,
}

impl FanReport {
    pub fn ok(&self) -> bool {
        self.simplicial && self.unimodular && self.face_closed && self.proper_intersections && self.pure
    }
}

impl Fan {
    /// Builds the fan generated by cones spanned by `e_S` for the given families of
    /// subsets of `Ẽ = {0, …, m-1}`, closed under taking faces.
    pub fn from_subset_cones(m: usize, generators: impl IntoIterator<Item = Vec<Subset>>) -> Self {
        let mut rays: Vec<LatticeVector> = Vec::new();
        let mut labels = Vec::new();
        let mut ray_index: HashMap<LatticeVector, usize> = HashMap::new();
        let mut cones: HashSet<Cone> = HashSet::new();
        cones.insert(Vec::new());
        for family in generators {
            let mut cone: Cone = family
                .into_iter()
                .map(|s| {
                    let v = primitive(&quotient_vector(m, s));
                    *ray_index.entry(v.clone()).or_insert_with(|| {
                        rays.push(v);
                        labels.push(s);
                        rays.len() - 1
                    })
                })
                .collect();
            cone.sort_unstable();
            cone.dedup();
            for sel in subset::submasks(subset::full(cone.len())) {
                cones.insert(subset::elements(sel).map(|i| cone[i]).collect());
            }
        }
        let mut cones: Vec<Cone> = cones.into_iter().collect();
        cones.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let set: HashSet<&Cone> = cones.iter().collect();
        let maximal: Vec<Cone> = cones
            .iter()
            .filter(|c| {
                !(0..rays.len()).any(|r| {
                    if c.contains(&r) {
                        return false;
                    }
                    let mut d = (*c).clone();
                    d.push(r);
                    d.sort_unstable();
                    set.contains(&d)
                })
            })
            .cloned()
            .collect();
        let cone_index = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Fan {
            ambient: m.saturating_sub(1),
            rays,
            labels,
            cones,
            maximal,
            cone_index,
            locators: OnceLock::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    /// The subset `S` with `e_S` generating each ray.
    pub fn ray_subsets(&self) -> &[Subset] {
        &self.labels
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn maximal_cones(&self) -> &[Cone] {
        &self.maximal
    }

    pub fn contains_cone(&self, cone: &[usize]) -> bool {
        self.cone_index.contains_key(cone)
    }

    pub fn dimension(&self) -> usize {
        self.cones.last().map_or(0, Vec::len)
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dimension();
        self.maximal.iter().all(|c| c.len() == d)
    }

    /// Cones as sets of ray vectors; comparable across fans.
    pub fn cone_set(&self) -> BTreeSet<Vec<LatticeVector>> {
        self.cones
            .iter()
            .map(|c| {
                let mut v: Vec<LatticeVector> = c.iter().map(|&r| self.rays[r].clone()).collect();
                v.sort();
                v
            })
            .collect()
    }

    pub fn same_cones(&self, other: &Fan) -> bool {
        self.ambient == other.ambient && self.cone_set() == other.cone_set()
    }

    pub fn to_json(&self) -> FanJson {
        FanJson {
            ambient_dim: self.ambient,
            rays: self.rays.clone(),
            ray_subsets: self.labels.clone(),
            cones: self.cones.clone(),
            maximal_cones: self.maximal.clone(),
        }
    }

    fn ray_matrix(&self, cone: &[usize]) -> IntMatrix {
        let rows = cone.iter().map(|&r| self.rays[r].clone()).collect::<Vec<_>>();
        IntMatrix::from_i64(&rows, self.ambient)
    }

    pub fn is_simplicial(&self) -> bool {
        self.maximal.iter().all(|c| linalg::int_rank(&self.ray_matrix(c)) == c.len())
    }

    /// Every cone's rays extend to a lattice basis. Faces inherit this from maximal cones.
    pub fn is_unimodular(&self) -> bool {
        self.maximal
            .iter()
            .all(|c| c.is_empty() || linalg::smith_normal_form(&self.ray_matrix(c)).all_ones())
    }

    pub fn is_face_closed(&self) -> bool {
        self.cones.iter().all(|c| {
            (0..c.len()).all(|skip| {
                let face: Cone = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                self.contains_cone(&face)
            })
        })
    }

    /// Every pair of maximal cones meets in their common face: a linear functional vanishes
    /// on the shared rays and separates the remaining ones.
    pub fn has_proper_intersections(&self) -> bool {
        let to_rat = |v: &LatticeVector| v.iter().map(|&x| rat(x)).collect::<Vec<Rational>>();
        let frames: Vec<Option<Frame>> = self
            .maximal
            .iter()
            .zip(self.locators())
            .map(|(c, l)| l.as_ref().map(|l| self.frame(c, l)))
            .collect();
        for (i, a) in self.maximal.iter().enumerate() {
            for (j, b) in self.maximal.iter().enumerate().skip(i + 1) {
                if self.separates(&frames[i], a, b) || self.separates(&frames[j], b, a) {
                    continue;
                }
                let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
                union.sort_unstable();
                union.dedup();
                if linalg::int_rank(&self.ray_matrix(&union)) == union.len() {
                    continue;
                }
                let mut ge = Vec::new();
                let mut eq = Vec::new();
                for &r in a {
                    if b.contains(&r) {
                        eq.push((to_rat(&self.rays[r]), rat(0)));
                    } else {
                        ge.push((to_rat(&self.rays[r]), rat(1)));
                    }
                }
                for &r in b {
                    if !a.contains(&r) {
                        ge.push((to_rat(&self.rays[r]).into_iter().map(|x| -x).collect(), rat(1)));
                    }
                }
                if !linalg::lp_feasible(&ge, &eq) {
                    return false;
                }
            }
        }
        true
    }

    /// Functionals dual to the rays of a cone and a basis of those vanishing on all of
    /// them, scaled to integer entries.
    fn frame(&self, cone: &Cone, loc: &Locator) -> Frame {
        let integral = |row: &[Rational], at: &mut dyn FnMut(usize) -> usize| {
            let lcd = row.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            let mut h = vec![0i128; self.ambient];
            for (k, x) in row.iter().enumerate() {
                let v = (x * Rational::from_integer(lcd.clone())).to_integer();
                h[at(k)] = v.to_i128().expect("functional entries fit in 128 bits");
            }
            h
        };
        let duals = (0..loc.inverse.rows()).map(|i| integral(loc.inverse.row(i), &mut |k| loc.rows[k])).collect();
        let normals = linalg::kernel_basis(&self.ray_matrix(cone).to_rational(), linalg::Pivoting::FirstNonzero)
            .iter()
            .map(|v| integral(v, &mut |k| k))
            .collect();
        Frame { duals, normals }
    }

    /// Looks for `h = Σ w_r d_r + Σ v_j n_j` with `w > 0` over the rays of `a` missing
    /// from `b` and `h < 0` on the rays of `b` missing from `a`, by perceptron updates in
    /// integers. `false` only means no certificate was found.
    fn separates(&self, frame: &Option<Frame>, a: &Cone, b: &Cone) -> bool {
        const ROUNDS: usize = 400;
        let Some(frame) = frame else { return false };
        let own: Vec<usize> = (0..a.len()).filter(|&k| !b.contains(&a[k])).collect();
        let basis: Vec<&Vec<i128>> = own.iter().map(|&k| &frame.duals[k]).chain(&frame.normals).collect();
        let dot = |h: &[i128], r: usize| self.rays[r].iter().zip(h).map(|(&x, y)| i128::from(x) * y).sum::<i128>();
        let mut rows: Vec<Vec<i128>> = (0..own.len())
            .map(|k| (0..basis.len()).map(|t| i128::from(t == k)).collect())
            .collect();
        for &s in b.iter().filter(|s| !a.contains(s)) {
            rows.push(basis.iter().map(|h| -dot(h, s)).collect());
        }
        let mut x: Vec<i128> = (0..basis.len()).map(|t| i128::from(t < own.len())).collect();
        for _ in 0..ROUNDS {
            let violated = rows.iter().find(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum::<i128>() <= 0);
            match violated {
                None => return true,
                Some(row) => {
                    for (q, p) in x.iter_mut().zip(row) {
                        *q = q.checked_add(*p).expect("perceptron weights stay small");
                    }
                }
            }
        }
        false
    }

    pub fn report(&self) -> FanReport {
        FanReport {
            simplicial: self.is_simplicial(),
            unimodular: self.is_unimodular(),
            face_closed: self.is_face_closed(),
            proper_intersections: self.has_proper_intersections(),
            pure: self.is_pure(),
            dimension: self.dimension(),
        }
    }

    fn locators(&self) -> &[Option<Locator>] {
        self.locators.get_or_init(|| {
            self.maximal
                .iter()
                .map(|c| {
                    // columns are rays; pick independent rows for a square system
                    let cols = self.ray_matrix(c).to_rational().transpose();
                    let mut rows: Vec<usize> = Vec::new();
                    for i in 0..cols.rows() {
                        let mut trial = rows.clone();
                        trial.push(i);
                        let sub = select_rows(&cols, &trial);
                        if linalg::rank(&sub) == trial.len() {
                            rows = trial;
                        }
                        if rows.len() == c.len() {
                            break;
                        }
                    }
                    if rows.len() < c.len() {
                        return None;
                    }
                    linalg::inverse(&select_rows(&cols, &rows)).map(|inverse| Locator { rows, inverse })
                })
                .collect()
        })
    }

    /// The cone whose relative interior contains `w`, if `w` lies in the support.
    pub fn find_cone(&self, w: &[Rational]) -> Option<Cone> {
        assert_eq!(w.len(), self.ambient, "point has the wrong dimension");
        if w.iter().all(Zero::is_zero) {
            return Some(Vec::new());
        }
        for (c, loc) in self.maximal.iter().zip(self.locators()) {
            let Some(loc) = loc else { continue };
            let wp: Vec<Rational> = loc.rows.iter().map(|&i| w[i].clone()).collect();
            let lambda = loc.inverse.mul_vec(&wp);
            if lambda.iter().any(|x| x.is_negative()) {
                continue;
            }
            let recon = (0..self.ambient).all(|j| {
                let s = c.iter().zip(&lambda).fold(rat(0), |acc, (&r, l)| acc + l * rat(self.rays[r][j]));
                s == w[j]
            });
            if recon {
                return Some(c.iter().zip(&lambda).filter(|(_, l)| l.is_positive()).map(|(&r, _)| r).collect());
            }
        }
        None
    }

    fn sum_of_rays(&self, cone: &[usize]) -> Vec<Rational> {
        (0..self.ambient).map(|j| rat(cone.iter().map(|&r| self.rays[r][j]).sum())).collect()
    }

    /// Is the ray vector `v` inside the cone `target` of `self`?
    fn vector_in_cone(&self, v: &[i64], target: &[usize]) -> bool {
        let w: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
        self.find_cone(&w).is_some_and(|c| c.iter().all(|r| target.contains(r)))
    }

    /// Every cone of `self` lies inside a cone of `coarse`.
    pub fn refines(&self, coarse: &Fan) -> bool {
        if self.ambient != coarse.ambient {
            return false;
        }
        self.maximal.iter().all(|c| {
            let Some(target) = coarse.find_cone(&self.sum_of_rays(c)) else { return false };
            c.iter().all(|&r| coarse.vector_in_cone(&self.rays[r], &target))
        })
    }

    /// When `self` refines `coarse`: every maximal cone of `coarse` is covered by the
    /// top-dimensional cones of `self` it contains (walls inside its relative interior
    /// have two neighbours, walls on its boundary one).
    fn covers(&self, coarse: &Fan) -> bool {
        let mut inside: HashMap<Cone, Vec<&Cone>> = HashMap::new();
        for c in &self.maximal {
            if let Some(t) = coarse.find_cone(&self.sum_of_rays(c)) {
                inside.entry(t).or_default().push(c);
            }
        }
        for tau in &coarse.maximal {
            let fine: Vec<&Cone> =
                inside.get(tau).map_or(Vec::new(), |v| v.iter().copied().filter(|c| c.len() == tau.len()).collect());
            if fine.is_empty() {
                return false;
            }
            let mut walls: HashMap<Cone, usize> = HashMap::new();
            for c in &fine {
                for skip in 0..c.len() {
                    let wall: Cone = c.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                    *walls.entry(wall).or_default() += 1;
                }
            }
            for (wall, count) in walls {
                let interior = coarse.find_cone(&self.sum_of_rays(&wall)).as_ref() == Some(tau);
                let expected = if interior { 2 } else { 1 };
                if count != expected {
                    return false;
                }
            }
        }
        true
    }

    /// Equality of supports. Exact when one fan refines the other; otherwise points
    /// sampled from random cones of each fan are located in the other.
    pub fn same_support(&self, other: &Fan, trials: usize, seed: u64) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        if self.refines(other) {
            return self.covers(other);
        }
        if other.refines(self) {
            return other.covers(self);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..trials {
            let (from, to) = if t % 2 == 0 { (self, other) } else { (other, self) };
            if from.maximal.is_empty() {
                continue;
            }
            let c = &from.maximal[rng.gen_range(0..from.maximal.len())];
            let mut w = vec![rat(0); from.ambient];
            for &r in c {
                let k = rng.gen_range(1..=7i64);
                for (j, x) in w.iter_mut().enumerate() {
                    *x += rat(k * from.rays[r][j]);
                }
            }
            if to.find_cone(&w).is_none() {
                return false;
            }
        }
        true
    }

    /// Unit-weight balancing at every codimension-one cone.
    pub fn balancing_check(&self) -> Result<bool> {
        if !self.is_pure() {
            return Err(Error::NotPure);
        }
        let d = self.dimension();
        if d == 0 {
            return Ok(true);
        }
        for tau in self.cones.iter().filter(|c| c.len() == d - 1) {
            let mut sum = vec![0i64; self.ambient];
            for sigma in self.maximal.iter().filter(|s| tau.iter().all(|r| s.contains(r))) {
                let extra = sigma.iter().find(|r| !tau.contains(r)).expect("codimension one");
                for (x, y) in sum.iter_mut().zip(&self.rays[*extra]) {
                    *x += y;
                }
            }
            let span = self.ray_matrix(tau).to_rational().transpose();
            let target: Vec<Rational> = sum.iter().map(|&x| rat(x)).collect();
            let ok = if tau.is_empty() {
                sum.iter().all(|&x| x == 0)
            } else {
                linalg::solve(&span, &target).is_some()
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Lattice determinant of a cone's rays (absolute gcd of maximal minors is one for
    /// unimodular cones); exposed for reports.
    pub fn cone_multiplicity(&self, cone: &[usize]) -> BigInt {
        let s = linalg::smith_normal_form(&self.ray_matrix(cone));
        s.diagonal.iter().fold(BigInt::from(1), |acc, d| acc * d.abs())
    }
}

fn select_rows(m: &RationalMatrix, rows: &[usize]) -> RationalMatrix {
    RationalMatrix::from_rows(rows.iter().map(|&i| m.row(i).to_vec()).collect(), m.cols())
}

/// `Σ_{P,G}`: cones spanned by `e_G` over the nested sets of the lifted building set
/// avoiding `Ẽ`.
pub fn bergman_fan(g: &BuildingSet) -> Result<Fan> {
    bergman_fan_capped(g, DEFAULT_MAX_CELLS)
}

pub fn bergman_fan_capped(g: &BuildingSet, max_cells: usize) -> Result<Fan> {
    let lifted = lifted_building_set(g)?;
    let top = lifted.lift.ground();
    let m = lifted.lift.projection().m();
    let nested = lifted.building.nested_complex(max_cells)?;
    Ok(Fan::from_subset_cones(m, nested.into_iter().filter(|n| !n.contains(&top))))
}

/// `Σ_P` from chains of flats `∅ = F_0 ⊊ F_1 ⊊ … ⊊ F_k ⊊ E` and sets `S ⊆ Ẽ` with
/// `rk(F ∪ π(T)) > rk(F) + |T|` for every `F` in the chain and nonempty
/// `T ⊆ S ∖ π⁻¹(F)`.
pub fn maximal_bergman_fan_direct(p: &Polymatroid) -> Result<Fan> {
    let proj = p.projection()?;
    let m = proj.m();
    let proper: Vec<Subset> = p
        .flat_lattice()
        .flats()
        .iter()
        .copied()
        .filter(|&f| f != 0 && f != p.ground())
        .collect();
    let admissible = |f: Subset, s: Subset| -> bool {
        let rest = s & !proj.preimage(f);
        subset::submasks(rest).skip(1).all(|t| {
            p.rank(f | proj.image(t)) > p.rank(f) + subset::size(t) as u32
        })
    };
    let mut generators: Vec<Vec<Subset>> = Vec::new();
    let mut chains: Vec<Vec<Subset>> = vec![Vec::new()];
    while let Some(chain) = chains.pop() {
        // S must be admissible for ∅ and each flat of the chain; the condition is
        // closed under shrinking S, so grow S one element at a time.
        let mut sets = vec![0 as Subset];
        let mut frontier = vec![0 as Subset];
        while let Some(s) = frontier.pop() {
            let start = if s == 0 { 0 } else { 32 - s.leading_zeros() as usize };
            for e in start..m {
                let t = s | 1 << e;
                if admissible(0, t) && chain.iter().all(|&f| admissible(f, t)) {
                    sets.push(t);
                    frontier.push(t);
                }
            }
        }
        for s in sets {
            let mut family: Vec<Subset> = chain.iter().map(|&f| proj.preimage(f)).collect();
            family.extend(subset::elements(s).map(|e| 1 << e));
            generators.push(family);
        }
        let last = chain.last().copied().unwrap_or(0);
        for &f in &proper {
            if f != last && subset::is_subset(last, f) {
                let mut next = chain.clone();
                next.push(f);
                chains.push(next);
            }
        }
        guard("chain cones", generators.len(), DEFAULT_MAX_CELLS)?;
    }
    Ok(Fan::from_subset_cones(m, generators))
}

/// `Σ_{B(π)}` from chains of proper nonempty subsets of `E` and fibre-free `S ⊆ Ẽ`.
pub fn boolean_bergman_fan(proj: &ProjectionMap) -> Result<Fan> {
    let n = proj.n();
    let m = proj.m();
    let ground = subset::full(n);
    let fiber_free: Vec<Subset> = subset::submasks(subset::full(m))
        .filter(|&s| (0..n).all(|i| proj.fiber(i) & !s != 0))
        .collect();
    let mut generators: Vec<Vec<Subset>> = Vec::new();
    let mut chains: Vec<Vec<Subset>> = vec![Vec::new()];
    while let Some(chain) = chains.pop() {
        for &s in &fiber_free {
            let mut family: Vec<Subset> = chain.iter().map(|&f| proj.preimage(f)).collect();
            family.extend(subset::elements(s).map(|e| 1 << e));
            generators.push(family);
        }
        guard("chain cones", generators.len(), DEFAULT_MAX_CELLS)?;
        let last = chain.last().copied().unwrap_or(0);
        for f in subset::submasks(ground) {
            if f != 0 && f != ground && f != last && subset::is_subset(last, f) {
                let mut next = chain.clone();
                next.push(f);
                chains.push(next);
            }
        }
    }
    Ok(Fan::from_subset_cones(m, generators))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(t: &[u32]) -> Polymatroid {
        Polymatroid::new(t.to_vec()).unwrap()
    }

    fn maximal_fan(t: &[u32]) -> Fan {
        bergman_fan(&BuildingSet::maximal(&pm(t))).unwrap()
    }

    fn rv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn quotient_representatives() {
        assert_eq!(quotient_vector(3, 0b001), vec![1, 0]);
        assert_eq!(quotient_vector(3, 0b100), vec![-1, -1]);
        assert_eq!(quotient_vector(3, 0b111), vec![0, 0]);
        assert_eq!(quotient_vector(3, 0b110), vec![-1, 0]);
        assert_eq!(primitive(&[2, -4, 0]), vec![1, -2, 0]);
    }

    #[test]
    fn small_fans() {
        let f = bergman_fan(&BuildingSet::new(pm(&[0, 2]), [1]).unwrap()).unwrap();
        assert_eq!(f.ambient_dim(), 1);
        let rays: BTreeSet<_> = f.rays().iter().cloned().collect();
        assert_eq!(rays, BTreeSet::from([vec![1], vec![-1]]));
        assert_eq!(f.cones().len(), 3);

        let f = maximal_fan(&[0, 1, 2, 2]);
        assert_eq!(f.rays().len(), 3);
        assert_eq!(f.maximal_cones().len(), 3);
        assert!(f.maximal_cones().iter().all(|c| c.len() == 1));

        let f = maximal_fan(&[0, 2, 2, 3]);
        assert_eq!(f.rays().len(), 6);
        assert_eq!(f.maximal_cones().len(), 8);
        assert_eq!(f.dimension(), 2);
        assert!(f.report().ok());
    }

    #[test]
    fn direct_construction_examples() {
        let p = pm(&[0, 1, 2, 2]);
        let f = maximal_bergman_fan_direct(&p).unwrap();
        // lift is U_{2,3} on {0 | 1 2}; the chain through {0} carries no extra rays
        assert!(!f.contains_cone(&{
            let a = f.rays().iter().position(|r| *r == quotient_vector(3, 0b001)).unwrap();
            let b = f.rays().iter().position(|r| *r == quotient_vector(3, 0b010)).unwrap();
            let mut c = vec![a, b];
            c.sort();
            c
        }));
        assert!(f.same_cones(&maximal_fan(&[0, 1, 2, 2])));
        let f = maximal_bergman_fan_direct(&pm(&[0, 2, 2, 3])).unwrap();
        assert!(f.cone_set().contains(&vec![]));
        // a full fibre as S is rejected
        let full_fiber = {
            let mut v = vec![quotient_vector(4, 0b0001), quotient_vector(4, 0b0010)];
            v.sort();
            v
        };
        assert!(!f.cone_set().contains(&full_fiber));
        assert!(f.same_cones(&maximal_fan(&[0, 2, 2, 3])));
    }

    #[test]
    fn boolean_fans() {
        let f = boolean_bergman_fan(&ProjectionMap::new(vec![1, 1]).unwrap()).unwrap();
        assert_eq!(f.maximal_cones().len(), 2);
        let f = boolean_bergman_fan(&ProjectionMap::new(vec![2]).unwrap()).unwrap();
        assert_eq!(f.rays().len(), 2);
        for sizes in [vec![1, 2], vec![2, 2], vec![1, 1, 1], vec![3, 1], vec![2, 1, 1]] {
            let proj = ProjectionMap::new(sizes).unwrap();
            let f = boolean_bergman_fan(&proj).unwrap();
            assert!(f.report().ok(), "{:?}", proj.fiber_sizes());
            assert_eq!(f.dimension(), proj.m() - 1);
            let b = bergman_fan(&BuildingSet::maximal(&Polymatroid::boolean(&proj))).unwrap();
            assert!(f.same_cones(&b));
            assert!(f.balancing_check().unwrap());
        }
    }

    #[test]
    fn boolean_fan_is_complete() {
        let proj = ProjectionMap::new(vec![1, 2]).unwrap();
        let f = boolean_bergman_fan(&proj).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w: Vec<Rational> = (0..2).map(|_| rat(rng.gen_range(-20..=20))).collect();
            let c = f.find_cone(&w).expect("complete fan");
            // relint point: unique cone containing it with all coefficients positive
            let hits = f
                .maximal_cones()
                .iter()
                .filter(|m| c.iter().all(|r| m.contains(r)))
                .count();
            assert!(hits >= 1);
        }
    }

    #[test]
    fn point_location() {
        let f = maximal_fan(&[0, 1, 2, 2]);
        assert_eq!(f.find_cone(&rv(&[0, 0])), Some(vec![]));
        let ray = f.rays().iter().position(|r| *r == quotient_vector(3, 0b001)).unwrap();
        assert_eq!(f.find_cone(&rv(&quotient_vector(3, 0b001))), Some(vec![ray]));
        let w: Vec<i64> = quotient_vector(3, 0b001).iter().zip(quotient_vector(3, 0b010)).map(|(a, b)| a + b).collect();
        assert_eq!(f.find_cone(&rv(&w)), None);
    }

    #[test]
    fn refinement_and_support() {
        let p = pm(&[0, 2, 2, 3]);
        let coarse = maximal_fan(&[0, 2, 2, 3]);
        let lift = crate::lift::MultisymMatroid::lift(&p).unwrap().as_polymatroid();
        let fine = bergman_fan(&BuildingSet::maximal(&lift)).unwrap();
        assert_eq!(fine.rays().len(), 10);
        assert!(coarse.refines(&coarse));
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(fine.same_support(&coarse, 50, 1));
        let boolean = boolean_bergman_fan(&p.projection().unwrap()).unwrap();
        assert!(!boolean.refines(&coarse));
        assert!(!coarse.same_support(&boolean, 50, 1));
        let q = pm(&[0, 1, 2, 2]);
        let lq = crate::lift::MultisymMatroid::lift(&q).unwrap().as_polymatroid();
        assert!(maximal_fan(&[0, 1, 2, 2]).same_support(&bergman_fan(&BuildingSet::maximal(&lq)).unwrap(), 50, 1));
    }

    #[test]
    fn overlapping_cones_detected() {
        let f = Fan::from_subset_cones(3, [vec![0b001, 0b010], vec![0b011, 0b001]]);
        assert!(f.is_unimodular());
        assert!(!f.has_proper_intersections());
        let g = Fan::from_subset_cones(3, [vec![0b001, 0b011], vec![0b011, 0b010]]);
        assert!(g.has_proper_intersections());
        let h = Fan::from_subset_cones(4, [vec![0b0011, 0b0100]]);
        assert!(h.is_unimodular());
        let k = Fan::from_subset_cones(3, [vec![0b001, 0b110]]);
        assert!(!k.is_simplicial());
    }

    #[test]
    fn balancing() {
        assert!(maximal_fan(&[0, 2]).balancing_check().unwrap());
        assert!(maximal_fan(&[0, 1, 2, 2]).balancing_check().unwrap());
        assert!(maximal_fan(&[0, 2, 2, 3]).balancing_check().unwrap());
        let f = Fan::from_subset_cones(3, [vec![0b001], vec![0b010]]);
        assert!(!f.balancing_check().unwrap());
        let g = Fan::from_subset_cones(3, [vec![0b001, 0b011], vec![0b010]]);
        assert_eq!(g.balancing_check(), Err(Error::NotPure));
    }
}
