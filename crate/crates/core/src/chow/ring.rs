use std::collections::{BTreeSet, HashMap};
use std::sync::RwLock;

use num::{BigInt, One, Zero};

use super::poly::{self, Monomial, Poly};
use crate::building::{lifted_building_set, BuildingSet, DEFAULT_MAX_CELLS};
use crate::error::{guard, Error, Result};
use crate::polymatroid::ProjectionMap;
use crate::subset::{self, Subset};

pub type IntPoly = Poly<BigInt>;

const MAX_VARIABLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presentation {
    /// `x_F`, `F ∈ G`, on the polymatroid itself.
    Dp,
    /// `y_G`, `G ∈ G̃`, on the lift; atom variables are eliminated by the linear relations.
    Fy,
}

enum Step {
    Zero,
    Replace(IntPoly),
}

/// A Chow ring presented by variables indexed by building-set members and reduced by a
/// lexicographic Gröbner basis in which smaller flats are larger variables.
pub struct GradedRing {
    presentation: Presentation,
    building: BuildingSet,
    projection: Option<ProjectionMap>,
    vars: Vec<Subset>,
    var_index: HashMap<Subset, usize>,
    eliminated: Vec<Option<IntPoly>>,
    top: usize,
    basis: Vec<Vec<Monomial>>,
    powers: RwLock<HashMap<(usize, usize), IntPoly>>,
    memo: RwLock<HashMap<Monomial, IntPoly>>,
}

impl std::fmt::Debug for GradedRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedRing")
            .field("presentation", &self.presentation)
            .field("vars", &self.vars)
            .field("top", &self.top)
            .finish()
    }
}

pub fn dp_ring(g: &BuildingSet) -> Result<GradedRing> {
    GradedRing::build(Presentation::Dp, g.clone(), None)
}

pub fn fy_ring(g: &BuildingSet) -> Result<GradedRing> {
    let lifted = lifted_building_set(g)?;
    GradedRing::build(Presentation::Fy, lifted.building, Some(lifted.lift.projection().clone()))
}

impl GradedRing {
    fn build(presentation: Presentation, building: BuildingSet, projection: Option<ProjectionMap>) -> Result<Self> {
        let r = building.base().total_rank() as usize;
        if r == 0 {
            return Err(Error::Instance("Chow ring of a rank-zero polymatroid".into()));
        }
        guard("ring variables", building.len(), MAX_VARIABLES)?;
        // members are stored in canonical order (size, then mask): containment implies
        // a later position, so smaller flats are larger variables
        let vars: Vec<Subset> = building.members().to_vec();
        let nvars = vars.len();
        let var_index: HashMap<Subset, usize> = vars.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut eliminated = vec![None; nvars];
        if presentation == Presentation::Fy {
            let base = building.base();
            for (a, &atom) in vars.iter().enumerate() {
                if base.rank(atom) != 1 {
                    continue;
                }
                // the relation for any element of the atom: y_A = -Σ_{G ⊋ A} y_G
                let mut expr = IntPoly::zero(nvars);
                for (h, &f) in vars.iter().enumerate() {
                    if h != a && subset::is_subset(atom, f) {
                        expr.add_term(poly::variable(nvars, h), -BigInt::one());
                    }
                }
                eliminated[a] = Some(expr);
            }
        }
        let mut ring = GradedRing {
            presentation,
            building,
            projection,
            vars,
            var_index,
            eliminated,
            top: r - 1,
            basis: Vec::new(),
            powers: RwLock::new(HashMap::new()),
            memo: RwLock::new(HashMap::new()),
        };
        ring.basis = ring.standard_monomials()?;
        Ok(ring)
    }

    pub fn presentation(&self) -> Presentation {
        self.presentation
    }

    pub fn building_set(&self) -> &BuildingSet {
        &self.building
    }

    /// Projection of the lift, for the FY presentation.
    pub fn projection(&self) -> Option<&ProjectionMap> {
        self.projection.as_ref()
    }

    pub fn variables(&self) -> &[Subset] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_of(&self, flat: Subset) -> Option<usize> {
        self.var_index.get(&flat).copied()
    }

    pub fn is_eliminated(&self, v: usize) -> bool {
        self.eliminated[v].is_some()
    }

    /// Top degree `r - 1`.
    pub fn top_degree(&self) -> usize {
        self.top
    }

    pub fn basis(&self) -> &[Vec<Monomial>] {
        &self.basis
    }

    pub fn hilbert_function(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn var_name(&self, v: usize) -> String {
        let letter = match self.presentation {
            Presentation::Dp => "x",
            Presentation::Fy => "y",
        };
        let elems: Vec<String> = subset::elements(self.vars[v]).map(|e| e.to_string()).collect();
        format!("{letter}{{{}}}", elems.join(","))
    }

    pub fn render(&self, f: &IntPoly) -> String {
        f.render(|v| self.var_name(v))
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        let s = poly::render_monomial(m, |v| self.var_name(v));
        if s.is_empty() {
            "1".into()
        } else {
            s
        }
    }

    pub fn var(&self, v: usize) -> IntPoly {
        IntPoly::var(self.nvars(), v)
    }

    pub fn monomial(&self, m: &Monomial) -> IntPoly {
        IntPoly::monomial(m.clone(), BigInt::one())
    }

    fn rank(&self, s: Subset) -> u32 {
        self.building.base().rank(s)
    }

    fn strictly_below(&self, v: usize, g: usize) -> bool {
        v != g && subset::is_subset(self.vars[v], self.vars[g])
    }

    /// `(Σ_{H ⊇ G} x_H)^b`.
    fn power(&self, g: usize, b: usize) -> IntPoly {
        if let Some(p) = self.powers.read().unwrap().get(&(g, b)) {
            return p.clone();
        }
        let mut sum = IntPoly::zero(self.nvars());
        for (h, &f) in self.vars.iter().enumerate() {
            if subset::is_subset(self.vars[g], f) {
                sum.add_term(poly::variable(self.nvars(), h), BigInt::one());
            }
        }
        let p = sum.pow(b);
        self.powers.write().unwrap().insert((g, b), p.clone());
        p
    }

    fn support(&self, m: &Monomial) -> Vec<usize> {
        m.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, _)| v).collect()
    }

    /// Largest exponent `b` allowed on `x_G` given the other variables in `support`:
    /// `rk(G) - rk(∪ support_{<G})`, possibly nonpositive.
    fn exponent_bound(&self, g: usize, support: &[usize]) -> i64 {
        let u = support
            .iter()
            .filter(|&&v| self.strictly_below(v, g))
            .fold(0, |acc, &v| acc | self.vars[v]);
        i64::from(self.rank(self.vars[g])) - i64::from(self.rank(u))
    }

    /// One division step against the Gröbner basis, if some leading term divides `m`.
    fn step(&self, m: &Monomial) -> Option<Step> {
        let support = self.support(m);
        match self.presentation {
            Presentation::Dp => {
                // b = 0 generators: bare monomials x_S with rk(∪S) ≥ rk(G)
                for g in 0..self.nvars() {
                    let has_below = support.iter().any(|&v| self.strictly_below(v, g));
                    if has_below && self.exponent_bound(g, &support) <= 0 {
                        return Some(Step::Zero);
                    }
                }
            }
            Presentation::Fy => {
                let flats: Vec<Subset> = support.iter().map(|&v| self.vars[v]).collect();
                if !self.building.is_nested(&flats) {
                    return Some(Step::Zero);
                }
            }
        }
        for &g in &support {
            if self.eliminated[g].is_some() {
                continue;
            }
            let b = self.exponent_bound(g, &support);
            if b >= 1 && i64::from(m[g]) >= b {
                let b = b as usize;
                let mut q = m.clone();
                q[g] -= b as u8;
                let mut tail = self.power(g, b);
                let mut lead = vec![0; self.nvars()];
                lead[g] = b as u8;
                tail.add_term(lead, -BigInt::one());
                return Some(Step::Replace(tail.mul_monomial(&q).neg()));
            }
        }
        None
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        m.iter().enumerate().all(|(v, &e)| e == 0 || self.eliminated[v].is_none()) && self.step(m).is_none()
    }

    fn eliminate(&self, f: &IntPoly) -> IntPoly {
        let mut out = f.clone();
        for (v, e) in self.eliminated.iter().enumerate() {
            if let Some(expr) = e {
                if out.terms().any(|(m, _)| m[v] > 0) {
                    out = out.substitute(v, expr);
                }
            }
        }
        out
    }

    fn normal_form_monomial(&self, m: &Monomial) -> IntPoly {
        if let Some(p) = self.memo.read().unwrap().get(m) {
            return p.clone();
        }
        let mut work: std::collections::BTreeMap<Monomial, BigInt> = std::collections::BTreeMap::new();
        work.insert(m.clone(), BigInt::one());
        let mut result = IntPoly::zero(self.nvars());
        while let Some((beta, c)) = work.pop_last() {
            if c.is_zero() {
                continue;
            }
            if &beta != m {
                if let Some(p) = self.memo.read().unwrap().get(&beta) {
                    result.add_scaled(p, &c);
                    continue;
                }
            }
            match self.step(&beta) {
                None => result.add_term(beta, c),
                Some(Step::Zero) => {}
                Some(Step::Replace(tail)) => {
                    for (gamma, d) in tail.terms() {
                        *work.entry(gamma.clone()).or_insert_with(BigInt::zero) += &c * d;
                    }
                }
            }
        }
        self.memo.write().unwrap().insert(m.clone(), result.clone());
        result
    }

    /// Canonical representative supported on standard monomials.
    pub fn normal_form(&self, f: &IntPoly) -> IntPoly {
        let f = self.eliminate(f);
        let mut out = IntPoly::zero(self.nvars());
        for (m, c) in f.terms() {
            out.add_scaled(&self.normal_form_monomial(m), c);
        }
        out
    }

    pub fn product(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        self.normal_form(&a.mul(b))
    }

    /// Standard monomials of degree `0..=top`, found by extending monomials one variable
    /// at a time; a reducible monomial has only reducible multiples.
    fn standard_monomials(&self) -> Result<Vec<Vec<Monomial>>> {
        let n = self.nvars();
        let mut by_degree: Vec<Vec<Monomial>> = vec![Vec::new(); self.top + 1];
        let mut stack: Vec<(Monomial, usize)> = vec![(vec![0; n], 0)];
        let mut count = 0usize;
        while let Some((m, last)) = stack.pop() {
            let d = poly::degree(&m);
            if d > self.top {
                return Err(Error::Inconsistent(format!(
                    "standard monomial {} above the top degree",
                    self.render_monomial(&m)
                )));
            }
            by_degree[d].push(m.clone());
            count += 1;
            guard("standard monomials", count, DEFAULT_MAX_CELLS)?;
            for v in last..n {
                if self.eliminated[v].is_some() {
                    continue;
                }
                let mut next = m.clone();
                next[v] += 1;
                if self.step(&next).is_none() {
                    stack.push((next, v));
                }
            }
        }
        for level in &mut by_degree {
            level.sort_by(|a, b| b.cmp(a));
        }
        Ok(by_degree)
    }

    /// Monomials `∏ x_{G_i}^{a_i}` over nested sets with
    /// `1 ≤ a_i < rk(G_i) - rk(∪ N_{<G_i})`, grouped by degree.
    pub fn nested_basis(&self) -> Result<Vec<Vec<Monomial>>> {
        let n = self.nvars();
        let mut by_degree: Vec<BTreeSet<Monomial>> = vec![BTreeSet::new(); self.top + 1];
        for nested in self.building.nested_complex(DEFAULT_MAX_CELLS)? {
            let idx: Vec<usize> = nested.iter().map(|f| self.var_index[f]).collect();
            let caps: Vec<i64> = idx.iter().map(|&g| self.exponent_bound(g, &idx) - 1).collect();
            if caps.iter().any(|&c| c < 1) {
                continue;
            }
            let mut monos: Vec<Monomial> = vec![vec![0; n]];
            for (&g, &cap) in idx.iter().zip(&caps) {
                monos = monos
                    .into_iter()
                    .flat_map(|m| {
                        (1..=cap).map(move |a| {
                            let mut m = m.clone();
                            m[g] = a as u8;
                            m
                        })
                    })
                    .collect();
            }
            for m in monos {
                let d = poly::degree(&m);
                if d > self.top {
                    return Err(Error::Inconsistent("nested basis monomial above the top degree".into()));
                }
                by_degree[d].insert(m);
            }
        }
        Ok(by_degree.into_iter().map(|s| s.into_iter().rev().collect()).collect())
    }

    /// Generators of the ideal in degrees `≤ max_degree`, in the non-eliminated
    /// variables. Intended for verification on small instances.
    pub fn explicit_generators(&self, max_degree: usize) -> Vec<IntPoly> {
        let n = self.nvars();
        let live: Vec<usize> = (0..n).filter(|&v| self.eliminated[v].is_none()).collect();
        let mut out = Vec::new();
        let square_free = |s: &[usize]| {
            let mut m = vec![0u8; n];
            for &v in s {
                m[v] = 1;
            }
            m
        };
        match self.presentation {
            Presentation::Dp => {
                for g in 0..n {
                    let below: Vec<usize> = (0..n).filter(|&v| self.strictly_below(v, g)).collect();
                    for s in subsets_up_to(&below, max_degree) {
                        let b = self.exponent_bound(g, &s).max(0) as usize;
                        if s.len() + b > max_degree || (b == 0 && s.is_empty()) {
                            continue;
                        }
                        out.push(self.power(g, b).mul_monomial(&square_free(&s)));
                    }
                }
            }
            Presentation::Fy => {
                for s in subsets_up_to(&live, max_degree) {
                    let flats: Vec<Subset> = s.iter().map(|&v| self.vars[v]).collect();
                    if s.len() >= 2 && !self.building.is_nested(&flats) {
                        // keep minimal non-nested families only
                        let minimal = (0..s.len()).all(|skip| {
                            let sub: Vec<Subset> =
                                flats.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &f)| f).collect();
                            self.building.is_nested(&sub)
                        });
                        if minimal {
                            out.push(IntPoly::monomial(square_free(&s), BigInt::one()));
                        }
                    }
                }
                for &g in &live {
                    let below: Vec<usize> = live.iter().copied().filter(|&v| self.strictly_below(v, g)).collect();
                    for s in subsets_up_to(&below, max_degree) {
                        let flats: Vec<Subset> = s.iter().map(|&v| self.vars[v]).collect();
                        let antichain = flats.iter().enumerate().all(|(i, &a)| {
                            flats[i + 1..].iter().all(|&b| !subset::is_subset(a, b) && !subset::is_subset(b, a))
                        });
                        if !antichain || !self.building.is_nested(&flats) {
                            continue;
                        }
                        let d = self.exponent_bound(g, &s);
                        if d < 1 || s.len() + d as usize > max_degree {
                            continue;
                        }
                        out.push(self.power(g, d as usize).mul_monomial(&square_free(&s)));
                    }
                }
            }
        }
        out
    }

    /// Buchberger's criterion on the explicit generators up to `max_degree`: every
    /// S-polynomial of degree `≤ max_degree` reduces to zero, as does every generator.
    pub fn s_pair_check(&self, max_degree: usize) -> bool {
        let gens = self.explicit_generators(max_degree);
        if gens.iter().any(|g| !self.normal_form(g).is_zero()) {
            return false;
        }
        for (i, f) in gens.iter().enumerate() {
            let (lf, _) = f.leading().expect("generators are nonzero");
            for g in &gens[i + 1..] {
                let (lg, _) = g.leading().expect("generators are nonzero");
                let lcm = poly::mono_lcm(lf, lg);
                if poly::degree(&lcm) > max_degree || poly::degree(&lcm) == poly::degree(lf) + poly::degree(lg) {
                    continue;
                }
                let s = f.mul_monomial(&poly::mono_div(&lcm, lf)).sub(&g.mul_monomial(&poly::mono_div(&lcm, lg)));
                if !self.normal_form(&s).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Coordinates of a normal form in the degree-`k` basis.
    pub fn coordinates(&self, f: &IntPoly, k: usize) -> Vec<BigInt> {
        let nf = self.normal_form(f);
        self.basis[k].iter().map(|m| nf.coeff(m)).collect()
    }
}

fn subsets_up_to(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::new(), 0usize)];
    while let Some((s, start)) = frontier.pop() {
        if s.len() == k {
            continue;
        }
        for (i, &item) in items.iter().enumerate().skip(start) {
            let mut t: Vec<usize> = s.clone();
            t.push(item);
            out.push(t.clone());
            frontier.push((t, i + 1));
        }
    }
    out
}
