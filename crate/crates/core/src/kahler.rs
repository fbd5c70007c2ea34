//! Strictly convex piecewise linear classes and the Kähler package (Hard Lefschetz,
//! Hodge-Riemann) in exact arithmetic.

use std::collections::{BTreeSet, HashMap};

use num::{BigInt, Integer, One, Signed, Zero};
use serde::Serialize;

use crate::building::{lifted_building_set, BuildingSet, DEFAULT_MAX_CELLS};
use crate::chow::{phi_map, GradedRing, IntPoly, Presentation};
use crate::error::{Error, Result};
use crate::fan::{Cone, Fan};
use crate::linalg::{self, rat, Pivoting, Rational, RationalMatrix};
use crate::polymatroid::{Polymatroid, ProjectionMap};
use crate::subset::{self, Subset};

/// Closure of `members` and all singletons of `0..m` under unions of intersecting pairs:
/// the smallest building set of the Boolean lattice containing them.
pub fn boolean_closure(m: usize, members: &[Subset]) -> Vec<Subset> {
    let mut set: BTreeSet<Subset> = members.iter().copied().chain((0..m).map(|i| 1 << i)).collect();
    loop {
        let current: Vec<Subset> = set.iter().copied().collect();
        let mut grew = false;
        for (i, &a) in current.iter().enumerate() {
            for &b in &current[i + 1..] {
                if a & b != 0 && set.insert(a | b) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<Subset> = set.into_iter().collect();
    subset::sort_canonical(&mut out);
    out
}

/// Complete ambient fan: the nested fan, on the Boolean lattice of `Ẽ`, of the Boolean
/// building closure of `G̃`. Returns the fan and the closure.
pub fn ambient_fan(g: &BuildingSet) -> Result<(Fan, Vec<Subset>)> {
    let lifted = lifted_building_set(g)?;
    let m = lifted.lift.projection().m();
    let closure = boolean_closure(m, lifted.building.members());
    let boolean = Polymatroid::boolean(&ProjectionMap::new(vec![1; m])?);
    let b = BuildingSet::new(boolean, closure.iter().copied())?;
    let top = subset::full(m);
    let nested = b.nested_complex(DEFAULT_MAX_CELLS)?;
    Ok((Fan::from_subset_cones(m, nested.into_iter().filter(|n| !n.contains(&top))), closure))
}

/// A piecewise linear function on a simplicial fan, given by its values on the rays.
#[derive(Debug, Clone)]
pub struct PlFunction {
    pub fan: Fan,
    pub values: Vec<Rational>,
    strictly_convex: bool,
}

impl PlFunction {
    pub fn new(fan: Fan, values: Vec<Rational>) -> Result<Self> {
        if values.len() != fan.rays().len() {
            return Err(Error::Inconsistent(format!("{} values for {} rays", values.len(), fan.rays().len())));
        }
        Ok(PlFunction { fan, values, strictly_convex: false })
    }

    /// Runs the wall test and records the outcome.
    pub fn validate(&mut self) -> Result<bool> {
        self.strictly_convex = is_strictly_convex(&self.fan, &self.values)?;
        Ok(self.strictly_convex)
    }

    pub fn is_validated(&self) -> bool {
        self.strictly_convex
    }

    pub fn value_on(&self, s: Subset) -> Option<&Rational> {
        self.fan.ray_subsets().iter().position(|&r| r == s).map(|i| &self.values[i])
    }

    pub fn scale(&self, k: &Rational) -> PlFunction {
        PlFunction {
            fan: self.fan.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
            strictly_convex: self.strictly_convex && k.is_positive(),
        }
    }

    /// `Σ ℓ(e_G) y_G` over the non-top variables of the lifted presentation, scaled by
    /// the least common denominator so the coefficients are integral. The positive
    /// scale does not affect any Kähler property.
    pub fn class(&self, fy: &GradedRing) -> Result<IntPoly> {
        if fy.presentation() != Presentation::Fy {
            return Err(Error::Inconsistent("classes live in the lifted presentation".into()));
        }
        let top = fy.projection().map(ProjectionMap::ground).unwrap_or(0);
        let mut entries = Vec::new();
        for (v, &g) in fy.variables().iter().enumerate() {
            if g == top {
                continue;
            }
            let value = self
                .value_on(g)
                .ok_or_else(|| Error::Inconsistent(format!("ring variable {} is not a ray", fy.var_name(v))))?;
            entries.push((v, value.clone()));
        }
        let lcd = entries.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut out = IntPoly::zero(fy.nvars());
        for (v, c) in entries {
            let scaled = c * Rational::from_integer(lcd.clone());
            out.add_scaled(&fy.var(v), &scaled.to_integer());
        }
        Ok(fy.normal_form(&out))
    }
}

/// Values `|B|·|S| − m·#{H ∈ B : H ⊆ S}` on the rays `e_S`, where `B` is the Boolean
/// closure of `G̃`: `−m` times the nestohedron support function corrected by a linear
/// function so that it vanishes on `(1, …, 1)`.
pub fn nestohedron_class(g: &BuildingSet) -> Result<PlFunction> {
    let (fan, closure) = ambient_fan(g)?;
    let m = fan.ambient_dim() + 1;
    let values = fan
        .ray_subsets()
        .iter()
        .map(|&s| {
            let below = closure.iter().filter(|&&h| subset::is_subset(h, s)).count();
            rat((closure.len() * subset::size(s)) as i64 - (m * below) as i64)
        })
        .collect();
    let mut ell = PlFunction::new(fan, values)?;
    if !ell.validate()? {
        return Err(Error::Inconsistent("nestohedron class failed the wall test".into()));
    }
    Ok(ell)
}

/// Wall test on a complete simplicial fan: for adjacent maximal cones with opposite rays
/// `u`, `u'` and `u + u' = Σ a_v v` over the wall, `ℓ(u) + ℓ(u') > Σ a_v ℓ(v)`.
pub fn is_strictly_convex(fan: &Fan, values: &[Rational]) -> Result<bool> {
    if !fan.is_simplicial() {
        return Err(Error::Inconsistent("fan is not simplicial".into()));
    }
    let d = fan.ambient_dim();
    let mut walls: HashMap<Cone, Vec<usize>> = HashMap::new();
    for (i, cone) in fan.maximal_cones().iter().enumerate() {
        if cone.len() != d {
            return Err(Error::NotComplete);
        }
        for skip in 0..cone.len() {
            let wall: Cone = cone.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &r)| r).collect();
            walls.entry(wall).or_default().push(i);
        }
    }
    let rays = fan.rays();
    for (wall, sides) in &walls {
        let [a, b] = sides[..] else { return Err(Error::NotComplete) };
        let opposite = |c: usize| -> usize {
            *fan.maximal_cones()[c].iter().find(|r| !wall.contains(r)).expect("maximal cone exceeds its wall")
        };
        let (u, w) = (opposite(a), opposite(b));
        let target: Vec<Rational> = (0..d).map(|k| rat(rays[u][k] + rays[w][k])).collect();
        let cols = RationalMatrix::from_rows(
            (0..d).map(|k| wall.iter().map(|&v| rat(rays[v][k])).collect()).collect(),
            wall.len(),
        );
        let coeffs = linalg::solve(&cols, &target)
            .ok_or_else(|| Error::Inconsistent("opposite rays do not sum into the wall".into()))?;
        let rhs = wall.iter().zip(&coeffs).fold(Rational::zero(), |acc, (&v, a)| acc + a * &values[v]);
        if &values[u] + &values[w] <= rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Degree map on a presentation, evaluating top-degree elements.
pub type DegreeMap<'a> = dyn Fn(&IntPoly) -> Rational + 'a;

fn power(ring: &GradedRing, ell: &IntPoly, e: usize) -> IntPoly {
    (0..e).fold(IntPoly::one(ring.nvars()), |acc, _| ring.product(&acc, ell))
}

/// Matrix of `a ↦ ℓ^e a` from degree `k` to degree `k + e`, one row per source basis
/// element.
fn multiplication_matrix(ring: &GradedRing, ell_power: &IntPoly, k: usize, e: usize) -> RationalMatrix {
    let rows: Vec<Vec<Rational>> = ring.basis()[k]
        .iter()
        .map(|m| {
            let image = ring.product(&ring.monomial(m), ell_power);
            if k + e > ring.top_degree() {
                return Vec::new();
            }
            ring.coordinates(&image, k + e).into_iter().map(Rational::from_integer).collect()
        })
        .collect();
    let cols = if k + e > ring.top_degree() { 0 } else { ring.basis()[k + e].len() };
    RationalMatrix::from_rows(rows, cols)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LefschetzResult {
    pub k: usize,
    pub dim: usize,
    pub rank: usize,
    pub ok: bool,
}

/// `ℓ^{r−2k−1}: A^k → A^{r−k−1}` is bijective, with `r − 1` the top degree.
pub fn hard_lefschetz_check(ring: &GradedRing, ell: &IntPoly, k: usize) -> Result<LefschetzResult> {
    let r = ring.top_degree() + 1;
    if 2 * k >= r {
        return Err(Error::Inconsistent(format!("k = {k} is outside 0 ≤ 2k < {r}")));
    }
    let e = r - 2 * k - 1;
    let mat = multiplication_matrix(ring, &power(ring, ell, e), k, e);
    let rank = if mat.rows() == 0 || mat.cols() == 0 { 0 } else { linalg::rank(&mat) };
    let dim = ring.basis()[k].len();
    let ok = mat.rows() == mat.cols() && rank == dim;
    Ok(LefschetzResult { k, dim, rank, ok })
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct HodgeRiemannResult {
    pub k: usize,
    pub primitive_dim: usize,
    /// Leading principal minors of the twisted Gram matrix, as strings.
    pub minors: Vec<String>,
    pub ok: bool,
}

/// Basis of `ker(ℓ^{r−2k}: A^k → A^{r−k})`, in coordinates of the degree-`k` basis.
pub fn primitive_basis(ring: &GradedRing, ell: &IntPoly, k: usize, pivoting: Pivoting) -> Vec<Vec<Rational>> {
    let r = ring.top_degree() + 1;
    let e = r - 2 * k;
    let dim = ring.basis()[k].len();
    if k + e > ring.top_degree() {
        return (0..dim).map(|i| (0..dim).map(|j| rat(i64::from(i == j))).collect()).collect();
    }
    let mat = multiplication_matrix(ring, &power(ring, ell, e), k, e);
    linalg::kernel_basis(&mat.transpose(), pivoting)
}

/// Gram matrix of `(a, b) ↦ sign · deg(ℓ^e a b)` on the given coordinate vectors in degree `k`.
pub fn twisted_gram(
    ring: &GradedRing,
    deg: &DegreeMap<'_>,
    ell: &IntPoly,
    k: usize,
    e: usize,
    sign: i64,
    vectors: &[Vec<Rational>],
) -> RationalMatrix {
    let basis = &ring.basis()[k];
    let le = power(ring, ell, e);
    let pairing: Vec<Vec<Rational>> = basis
        .iter()
        .map(|a| {
            let la = ring.product(&le, &ring.monomial(a));
            basis.iter().map(|b| deg(&ring.product(&la, &ring.monomial(b))) * rat(sign)).collect()
        })
        .collect();
    let n = vectors.len();
    let mut gram = RationalMatrix::filled(n, n, Rational::zero());
    for i in 0..n {
        for j in 0..n {
            let mut s = Rational::zero();
            for (p, row) in pairing.iter().enumerate() {
                if vectors[i][p].is_zero() {
                    continue;
                }
                for (q, x) in row.iter().enumerate() {
                    if !vectors[j][q].is_zero() {
                        s += &vectors[i][p] * x * &vectors[j][q];
                    }
                }
            }
            gram[(i, j)] = s;
        }
    }
    gram
}

/// `(a, b) ↦ (−1)^k deg(ℓ^{r−2k−1} a b)` is positive definite on the primitive part.
pub fn hodge_riemann_check(ring: &GradedRing, deg: &DegreeMap<'_>, ell: &IntPoly, k: usize) -> Result<HodgeRiemannResult> {
    hodge_riemann_with(ring, deg, ell, k, Pivoting::FirstNonzero)
}

pub fn hodge_riemann_with(
    ring: &GradedRing,
    deg: &DegreeMap<'_>,
    ell: &IntPoly,
    k: usize,
    pivoting: Pivoting,
) -> Result<HodgeRiemannResult> {
    let r = ring.top_degree() + 1;
    if 2 * k >= r {
        return Err(Error::Inconsistent(format!("k = {k} is outside 0 ≤ 2k < {r}")));
    }
    let prim = primitive_basis(ring, ell, k, pivoting);
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let gram = twisted_gram(ring, deg, ell, k, r - 2 * k - 1, sign, &prim);
    let minors = linalg::leading_principal_minors(&gram);
    let ok = linalg::is_positive_definite(&gram)?;
    Ok(HodgeRiemannResult { k, primitive_dim: prim.len(), minors: minors.iter().map(|m| m.to_string()).collect(), ok })
}

/// `−Σ_{G ∈ G, G ⊇ F} x_G` in the `x_F` presentation.
pub fn sigma_cone_class(dp: &GradedRing, f: Subset) -> Result<IntPoly> {
    if dp.presentation() != Presentation::Dp {
        return Err(Error::Inconsistent("σ-cone classes live in the x presentation".into()));
    }
    if dp.var_of(f).is_none() {
        return Err(Error::NotAMember(f));
    }
    let mut out = IntPoly::zero(dp.nvars());
    for (v, &g) in dp.variables().iter().enumerate() {
        if subset::is_subset(f, g) {
            out.add_scaled(&dp.var(v), &-BigInt::one());
        }
    }
    Ok(out)
}

/// `β = Σ_{F ∌ i} x_F` for a matroid with its maximal building set.
pub fn beta_class(dp: &GradedRing, i: usize) -> Result<IntPoly> {
    let base = dp.building_set().base();
    if dp.presentation() != Presentation::Dp || !base.is_matroid() {
        return Err(Error::Inconsistent("β is defined for matroids in the x presentation".into()));
    }
    let mut out = IntPoly::zero(dp.nvars());
    for (v, &f) in dp.variables().iter().enumerate() {
        if !subset::contains(f, i) {
            out.add_scaled(&dp.var(v), &BigInt::one());
        }
    }
    Ok(out)
}

/// Image of an element of the `x_F` presentation in the lifted one.
pub fn transport(dp: &GradedRing, fy: &GradedRing, f: &IntPoly) -> Result<IntPoly> {
    let phi = phi_map(dp, fy)?;
    Ok(fy.normal_form(&crate::chow::apply_phi(&phi, fy.nvars(), f)))
}

/// Preimage of a degree-one element of the lifted presentation.
pub fn pull_back_degree_one(dp: &GradedRing, fy: &GradedRing, f: &IntPoly) -> Result<IntPoly> {
    let phi = phi_map(dp, fy)?;
    let images: Vec<Vec<Rational>> = dp.basis()[1]
        .iter()
        .map(|m| {
            fy.coordinates(&crate::chow::apply_phi(&phi, fy.nvars(), &dp.monomial(m)), 1)
                .into_iter()
                .map(Rational::from_integer)
                .collect()
        })
        .collect();
    let target: Vec<Rational> = fy.coordinates(f, 1).into_iter().map(Rational::from_integer).collect();
    let a = RationalMatrix::from_rows(images, target.len()).transpose();
    let x = linalg::solve(&a, &target).ok_or_else(|| Error::Inconsistent("class is not in the image".into()))?;
    let mut out = IntPoly::zero(dp.nvars());
    for (m, c) in dp.basis()[1].iter().zip(x) {
        if !c.is_integer() {
            return Err(Error::Inconsistent("non-integral preimage".into()));
        }
        out.add_scaled(&dp.monomial(m), &c.to_integer());
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct KahlerReport {
    pub strictly_convex: bool,
    pub top_degree_positive: bool,
    pub hard_lefschetz: Vec<LefschetzResult>,
    pub hodge_riemann: Vec<HodgeRiemannResult>,
}

impl KahlerReport {
    pub fn ok(&self) -> bool {
        self.strictly_convex
            && self.top_degree_positive
            && self.hard_lefschetz.iter().all(|h| h.ok)
            && self.hodge_riemann.iter().all(|h| h.ok)
    }
}

/// HL and HR for every `0 ≤ k < r/2` on `ring` with the class `ell` and degree map `deg`.
pub fn kahler_report(ring: &GradedRing, deg: &DegreeMap<'_>, ell: &IntPoly, strictly_convex: bool) -> Result<KahlerReport> {
    let r = ring.top_degree() + 1;
    let top = deg(&power(ring, ell, r - 1));
    let mut hard_lefschetz = Vec::new();
    let mut hodge_riemann = Vec::new();
    for k in 0..r.div_ceil(2) {
        hard_lefschetz.push(hard_lefschetz_check(ring, ell, k)?);
        hodge_riemann.push(hodge_riemann_check(ring, deg, ell, k)?);
    }
    Ok(KahlerReport { strictly_convex, top_degree_positive: top.is_positive(), hard_lefschetz, hodge_riemann })
}

#[cfg(test)]
mod tests;
