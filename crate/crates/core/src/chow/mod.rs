//! Chow rings of polymatroids with a building set, in the `x_F` presentation on the
//! polymatroid and the `y_G` presentation on the lift, with the comparison map
//! `x_F ↦ y_{π⁻¹(F)}`, the degree map and Poincaré pairings.

pub mod poly;
pub mod presentation;
mod ring;

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

pub use ring::{dp_ring, fy_ring, GradedRing, IntPoly, Presentation};

use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{self, IntMatrix, Rational};
use poly::Monomial;

/// `φ`: index of `y_{π⁻¹(F)}` for each variable `x_F`.
pub fn phi_map(dp: &GradedRing, fy: &GradedRing) -> Result<Vec<usize>> {
    let proj = fy.projection().ok_or_else(|| Error::Inconsistent("target ring has no projection".into()))?;
    dp.variables()
        .iter()
        .map(|&f| {
            fy.var_of(proj.preimage(f))
                .ok_or_else(|| Error::Inconsistent(format!("preimage of {f:#b} is not a lifted member")))
        })
        .collect()
}

pub fn apply_phi(phi: &[usize], fy_nvars: usize, f: &IntPoly) -> IntPoly {
    let mut out = IntPoly::zero(fy_nvars);
    for (m, c) in f.terms() {
        let mut image = vec![0u8; fy_nvars];
        for (v, &e) in m.iter().enumerate() {
            image[phi[v]] += e;
        }
        out.add_term(image, c.clone());
    }
    out
}

/// The degree map on `A(Σ_{P,G})`, normalized by `deg(∏_{G ∈ N} y_G) = 1` on every
/// maximal cone.
#[derive(Debug, Clone)]
pub struct DegreeFunctional {
    pub top_monomial: Monomial,
    /// Degree of the top standard monomial.
    pub value: Rational,
    /// Coefficient of the top standard monomial in each maximal-cone monomial.
    pub cone_coefficients: Vec<BigInt>,
    pub consistent: bool,
}

impl DegreeFunctional {
    pub fn integral(&self) -> bool {
        self.value.is_integer()
    }

    pub fn degree(&self, fy: &GradedRing, f: &IntPoly) -> Rational {
        Rational::from_integer(fy.normal_form(f).coeff(&self.top_monomial)) * &self.value
    }
}

pub fn degree_functional(fy: &GradedRing, fan: &Fan) -> Result<DegreeFunctional> {
    if fy.presentation() != Presentation::Fy {
        return Err(Error::Inconsistent("degree map is defined on the lifted presentation".into()));
    }
    let top = fy.top_degree();
    let tops = &fy.basis()[top];
    if tops.len() != 1 {
        return Err(Error::Inconsistent(format!("top degree has dimension {}", tops.len())));
    }
    let top_monomial = tops[0].clone();
    let mut cone_coefficients = Vec::new();
    for cone in fan.maximal_cones() {
        if cone.len() != top {
            return Err(Error::NotPure);
        }
        let mut m = vec![0u8; fy.nvars()];
        for &r in cone {
            let v = fy
                .var_of(fan.ray_subsets()[r])
                .ok_or_else(|| Error::Inconsistent("fan ray is not a ring variable".into()))?;
            m[v] += 1;
        }
        cone_coefficients.push(fy.normal_form(&fy.monomial(&m)).coeff(&top_monomial));
    }
    let first = cone_coefficients.first().cloned().unwrap_or_else(BigInt::one);
    let consistent = !first.is_zero() && cone_coefficients.iter().all(|c| *c == first);
    let value = if first.is_zero() { Rational::zero() } else { Rational::from_integer(first.clone()).recip() };
    Ok(DegreeFunctional { top_monomial, value, cone_coefficients, consistent })
}

/// `[deg(b_i · b_j)]` over the degree-`k` and degree-`(top - k)` bases of `ring`, where
/// `deg` evaluates top-degree elements of `ring`.
pub fn pairing_matrix(ring: &GradedRing, k: usize, deg: impl Fn(&IntPoly) -> Rational) -> Result<IntMatrix> {
    let top = ring.top_degree();
    if k > top {
        return Err(Error::Inconsistent(format!("degree {k} exceeds the top degree {top}")));
    }
    let rows = &ring.basis()[k];
    let cols = &ring.basis()[top - k];
    if rows.len() != cols.len() {
        return Err(Error::Inconsistent(format!(
            "pairing between degrees {k} and {} is {}x{}",
            top - k,
            rows.len(),
            cols.len()
        )));
    }
    let mut entries = Vec::with_capacity(rows.len());
    for a in rows {
        let mut row = Vec::with_capacity(cols.len());
        for b in cols {
            let d = deg(&ring.product(&ring.monomial(a), &ring.monomial(b)));
            if !d.is_integer() {
                return Err(Error::Inconsistent("non-integral degree".into()));
            }
            row.push(d.to_integer());
        }
        entries.push(row);
    }
    Ok(IntMatrix::from_rows(entries, cols.len()))
}

/// Degree map on the `x_F` presentation, transported through `φ`.
pub fn dp_degree<'a>(
    dp: &'a GradedRing,
    fy: &'a GradedRing,
    phi: &'a [usize],
    deg: &'a DegreeFunctional,
) -> impl Fn(&IntPoly) -> Rational + 'a {
    move |f: &IntPoly| deg.degree(fy, &apply_phi(phi, fy.nvars(), &dp.normal_form(f)))
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct IsoReport {
    pub hilbert_dp: Vec<usize>,
    pub hilbert_fy: Vec<usize>,
    /// Every generator of the `x_F` ideal up to degree `top + 1` maps to zero.
    pub generators_vanish: bool,
    /// In each degree, images of the `x_F` basis have unimodular coordinates in the
    /// `y_G` basis.
    pub bases_correspond: bool,
    /// `φ(b_i b_j) = φ(b_i) φ(b_j)` in normal form for all basis pairs.
    pub structure_constants: bool,
}

impl IsoReport {
    pub fn ok(&self) -> bool {
        self.hilbert_dp == self.hilbert_fy && self.generators_vanish && self.bases_correspond && self.structure_constants
    }
}

pub fn phi_iso_check(dp: &GradedRing, fy: &GradedRing) -> Result<IsoReport> {
    let phi = phi_map(dp, fy)?;
    let nfy = fy.nvars();
    let generators_vanish = dp
        .explicit_generators(dp.top_degree() + 1)
        .iter()
        .all(|g| fy.normal_form(&apply_phi(&phi, nfy, g)).is_zero());
    let hilbert_dp = dp.hilbert_function();
    let hilbert_fy = fy.hilbert_function();
    let mut bases_correspond = hilbert_dp == hilbert_fy;
    if bases_correspond {
        for k in 0..=dp.top_degree() {
            let rows: Vec<Vec<BigInt>> = dp.basis()[k]
                .iter()
                .map(|m| fy.coordinates(&apply_phi(&phi, nfy, &dp.monomial(m)), k))
                .collect();
            let mat = IntMatrix::from_rows(rows, fy.basis()[k].len());
            if !linalg::int_determinant(&mat).abs().is_one() {
                bases_correspond = false;
                break;
            }
        }
    }
    let mut structure_constants = true;
    let all: Vec<&Monomial> = dp.basis().iter().flatten().collect();
    'outer: for (i, a) in all.iter().enumerate() {
        for b in &all[i..] {
            let prod = dp.product(&dp.monomial(a), &dp.monomial(b));
            let lhs = fy.normal_form(&apply_phi(&phi, nfy, &prod));
            let rhs = fy.product(&apply_phi(&phi, nfy, &dp.monomial(a)), &apply_phi(&phi, nfy, &dp.monomial(b)));
            if lhs != rhs {
                structure_constants = false;
                break 'outer;
            }
        }
    }
    Ok(IsoReport { hilbert_dp, hilbert_fy, generators_vanish, bases_correspond, structure_constants })
}
