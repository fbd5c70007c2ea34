//! The full verification suite on a single instance.

use num::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::building::{BuildingSet, DEFAULT_MAX_CELLS};
use crate::chow::{degree_functional, dp_degree, dp_ring, fy_ring, pairing_matrix, phi_iso_check, phi_map};
use crate::error::Result;
use crate::fan::{bergman_fan_capped, boolean_bergman_fan, maximal_bergman_fan_direct, Fan};
use crate::kahler::{ambient_fan, kahler_report, nestohedron_class};
use crate::lift::MultisymMatroid;
use crate::linalg::{int_determinant, ratio};
use crate::polymatroid::Polymatroid;
use crate::polytope::{default_c, minimizing_vertices, normal_fan_equals, polypermutohedron};
use crate::subset::{self, Subset};

/// Largest ground set for fan, ring and Kähler computations.
pub const MAX_FAN_GROUND: usize = 8;
/// Largest lift checked by brute force over all pairs of subsets.
pub const MAX_BRUTE_LIFT: usize = 10;
/// Largest rank for which the Kähler section runs.
pub const MAX_KAHLER_RANK: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub status: Status,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub sections: Vec<Section>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.sections.iter().all(|s| s.status != Status::Fail)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub max_cells: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, trials: 1000, max_cells: DEFAULT_MAX_CELLS }
    }
}

/// Brute-force matroid axioms on the lift over all pairs of subsets, plus
/// `rk(π⁻¹(A)) = rk_P(A)` for every `A`.
pub fn lift_axioms(lift: &MultisymMatroid) -> (bool, bool) {
    let ground = lift.ground();
    let subsets: Vec<Subset> = subset::submasks(ground).collect();
    let rank: Vec<u32> = (0..=ground).map(|s| lift.rank(s)).collect();
    let axioms = rank[0] == 0
        && subsets.iter().all(|&s| rank[s as usize] as usize <= subset::size(s))
        && subsets.iter().all(|&a| {
            subsets.iter().all(|&b| {
                let monotone = !subset::is_subset(a, b) || rank[a as usize] <= rank[b as usize];
                monotone && rank[(a | b) as usize] + rank[(a & b) as usize] <= rank[a as usize] + rank[b as usize]
            })
        });
    let base = lift.base();
    let stable = subset::submasks(base.ground()).all(|a| lift.rank(lift.projection().preimage(a)) == base.rank(a));
    (axioms, stable)
}

/// Every valid rank table on `n` elements with `rk(i) ≤ max_single` and
/// `rk(E) ≤ max_total`.
pub fn enumerate_polymatroids(n: usize, max_single: u32, max_total: u32) -> Vec<Polymatroid> {
    let len = 1usize << n;
    let mut out = Vec::new();
    let mut table = vec![0u32; len];
    fn fill(pos: usize, table: &mut Vec<u32>, max_single: u32, max_total: u32, out: &mut Vec<Polymatroid>) {
        if pos == table.len() {
            if let Ok(p) = Polymatroid::new(table.clone()) {
                out.push(p);
            }
            return;
        }
        let s = pos as Subset;
        // monotone under adding one element and bounded by the sum of singletons
        let low = subset::elements(s).map(|i| table[(s & !(1 << i)) as usize]).max().unwrap_or(0);
        let high = if subset::size(s) == 1 {
            max_single
        } else {
            subset::elements(s).map(|i| table[1 << i]).sum::<u32>().min(max_total)
        };
        for v in low.max(u32::from(subset::size(s) == 1))..=high {
            table[pos] = v;
            fill(pos + 1, table, max_single, max_total, out);
        }
    }
    fill(1, &mut table, max_single, max_total, &mut out);
    out
}

/// A building set obtained from the maximal one by greedily dropping members while it
/// stays geometric; `None` when no member can be dropped.
pub fn smaller_building_set(p: &Polymatroid) -> Option<BuildingSet> {
    let mut members: Vec<Subset> = BuildingSet::maximal(p).members().to_vec();
    let mut changed = false;
    let mut i = 0;
    while i < members.len() {
        if members[i] == p.ground() {
            i += 1;
            continue;
        }
        let trial: Vec<Subset> = members.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &f)| f).collect();
        match BuildingSet::new(p.clone(), trial.iter().copied()) {
            Ok(b) if b.is_geometric_building_set().is_ok() => {
                members = trial;
                changed = true;
            }
            _ => i += 1,
        }
    }
    changed.then(|| BuildingSet::new(p.clone(), members).expect("members were validated"))
}

fn section(name: &'static str, f: impl FnOnce() -> Result<(bool, Value)>) -> Section {
    match f() {
        Ok((ok, detail)) => Section { name, status: Status::from_bool(ok), detail },
        Err(e) => Section { name, status: Status::Fail, detail: json!({ "error": e.to_string() }) },
    }
}

fn skipped(name: &'static str, reason: String) -> Section {
    Section { name, status: Status::Skipped, detail: json!({ "reason": reason }) }
}

fn fan_structure(fan: &Fan, expected_dim: usize) -> Result<(bool, Value)> {
    let report = fan.report();
    let balanced = fan.balancing_check()?;
    let ok = report.ok() && balanced && fan.dimension() == expected_dim;
    Ok((ok, json!({ "report": report, "balanced": balanced, "dimension": fan.dimension(), "expected_dimension": expected_dim })))
}

/// Degree consistency and `det = ±1` for every pairing in both presentations.
pub fn pairings_unimodular(g: &BuildingSet, fan: &Fan) -> Result<(bool, Value)> {
    let dp = dp_ring(g)?;
    let fy = fy_ring(g)?;
    let deg = degree_functional(&fy, fan)?;
    let phi = phi_map(&dp, &fy)?;
    let dp_deg = dp_degree(&dp, &fy, &phi, &deg);
    let mut dets = Vec::new();
    let mut ok = deg.consistent && deg.integral();
    for k in 0..=fy.top_degree() {
        let a = int_determinant(&pairing_matrix(&fy, k, |f| deg.degree(&fy, f))?);
        let b = int_determinant(&pairing_matrix(&dp, k, &dp_deg)?);
        ok &= a.abs().is_one() && b.abs().is_one();
        dets.push([a.to_string(), b.to_string()]);
    }
    Ok((ok, json!({ "degree_consistent": deg.consistent, "determinants": dets })))
}

/// Runs every section on `(p, g)`. Sections that fail report their evidence; sections
/// outside the size limits are skipped.
pub fn verify_all(p: &Polymatroid, g: &BuildingSet, opts: &VerifyOptions) -> Result<VerifyReport> {
    let proj = p.projection()?;
    let lift = MultisymMatroid::lift(p)?;
    let r = p.total_rank();
    let mut sections = Vec::new();

    sections.push(section("lift", || {
        if lift.m() > MAX_BRUTE_LIFT {
            // local exchange checks are equivalent to the axioms and scale further
            let table = (0..=lift.ground()).map(|s| lift.rank(s)).collect();
            let valid = Polymatroid::new(table).is_ok();
            return Ok((valid, json!({ "matroid_axioms": valid, "method": "local", "m": lift.m() })));
        }
        let (axioms, stable) = lift_axioms(&lift);
        Ok((axioms && stable, json!({ "matroid_axioms": axioms, "stable_sets": stable, "m": lift.m() })))
    }));
    sections.push(section("lattice", || {
        let geo = lift.geometric_flat_lattice()?;
        Ok((geo.isomorphic && geo.sublattice, json!({ "isomorphic": geo.isomorphic, "sublattice": geo.sublattice })))
    }));
    sections.push(section("building_set", || {
        let cert = g.is_geometric_building_set();
        Ok((cert.is_ok(), json!({ "members": g.len(), "certificate": cert.to_string() })))
    }));

    if p.n() > MAX_FAN_GROUND || r == 0 {
        for name in ["fan_construction", "polytope", "fan_structure", "refinement", "chow", "isomorphism", "poincare", "kahler"] {
            sections.push(skipped(name, format!("requires 0 < rank and n <= {MAX_FAN_GROUND}")));
        }
        return Ok(VerifyReport { sections });
    }

    let maximal = BuildingSet::maximal(p);
    let fan = bergman_fan_capped(g, opts.max_cells);
    sections.push(section("fan_construction", || {
        let nested = bergman_fan_capped(&maximal, opts.max_cells)?;
        let direct = maximal_bergman_fan_direct(p)?;
        let agree = nested.same_cones(&direct);
        let boolean = if p.is_boolean() { Some(nested.same_cones(&boolean_bergman_fan(&proj)?)) } else { None };
        Ok((agree && boolean != Some(false), json!({ "nested_equals_direct": agree, "boolean": boolean, "maximal_cones": nested.maximal_cones().len() })))
    }));
    sections.push(section("polytope", || {
        let q = polypermutohedron(&proj, &default_c(proj.n()))?;
        let fan_b = boolean_bergman_fan(&proj)?;
        let normal = normal_fan_equals(&q, &fan_b, opts.trials, opts.seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut agree = 0usize;
        for _ in 0..opts.trials {
            let w: Vec<_> = (0..proj.m()).map(|_| ratio(rng.gen_range(-12..=12), rng.gen_range(1..=4))).collect();
            agree += usize::from(minimizing_vertices(&q, &w).agree());
        }
        Ok((normal && agree == opts.trials, json!({ "vertices": q.vertices().len(), "normal_fan": normal, "minimizer_agreement": [agree, opts.trials] })))
    }));
    sections.push(section("fan_structure", || {
        let fan = fan.clone()?;
        let (a, da) = fan_structure(&fan, r as usize - 1)?;
        let (b, db) = fan_structure(&boolean_bergman_fan(&proj)?, proj.m() - 1)?;
        Ok((a && b, json!({ "bergman": da, "boolean": db })))
    }));
    sections.push(section("refinement", || {
        let fan = fan.clone()?;
        let lifted = lift.as_polymatroid();
        let fine = bergman_fan_capped(&BuildingSet::maximal(&lifted), opts.max_cells)?;
        let refines = fine.refines(&fan);
        let support = fine.same_support(&fan, opts.trials, opts.seed);
        Ok((refines && support, json!({ "refines": refines, "same_support": support })))
    }));

    let rings = dp_ring(g).and_then(|dp| Ok((dp, fy_ring(g)?)));
    sections.push(section("chow", || {
        let (dp, fy) = rings.as_ref().map_err(Clone::clone)?;
        let nested = dp.nested_basis()?;
        let h = dp.hilbert_function();
        let symmetric = h.iter().eq(h.iter().rev());
        let groebner = dp.s_pair_check(dp.top_degree() + 1);
        let ok = nested == dp.basis() && h == fy.hilbert_function() && symmetric && groebner;
        Ok((ok, json!({ "hilbert": h, "hilbert_fy": fy.hilbert_function(), "nested_basis": nested == dp.basis(), "symmetric": symmetric, "s_pairs": groebner })))
    }));
    sections.push(section("isomorphism", || {
        let (dp, fy) = rings.as_ref().map_err(Clone::clone)?;
        let mut reports = vec![phi_iso_check(dp, fy)?];
        if g.members() != maximal.members() {
            reports.push(phi_iso_check(&dp_ring(&maximal)?, &fy_ring(&maximal)?)?);
        }
        Ok((reports.iter().all(|r| r.ok()), json!(reports)))
    }));
    sections.push(section("poincare", || pairings_unimodular(g, fan.as_ref().map_err(Clone::clone)?)));

    if r > MAX_KAHLER_RANK {
        sections.push(skipped("kahler", format!("requires rank <= {MAX_KAHLER_RANK}")));
    } else {
        sections.push(section("kahler", || {
            let (_, fy) = rings.as_ref().map_err(Clone::clone)?;
            let fan = fan.clone()?;
            let ell = nestohedron_class(g)?;
            let (ambient, _) = ambient_fan(g)?;
            let subfan = fan.cone_set().is_subset(&ambient.cone_set());
            let deg = degree_functional(fy, &fan)?;
            let class = ell.class(fy)?;
            let evaluate = |f: &crate::chow::IntPoly| deg.degree(fy, f);
            let report = kahler_report(fy, &evaluate, &class, ell.is_validated())?;
            Ok((subfan && report.ok(), json!({ "subfan": subfan, "class": fy.render(&class), "report": report })))
        }));
    }
    Ok(VerifyReport { sections })
}
