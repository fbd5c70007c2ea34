//! The presentation of `A(Σ_P)` by variables `z_F` (nonempty proper flats) and `z_i`
//! (elements of `Ẽ`), with `z_∅ = 1`. Its Hilbert function is computed from the face ring
//! modulo the linear relations, independently of the Gröbner machinery. The same count
//! applies to the fan of any building set.

use std::collections::HashMap;

use crate::error::{guard, Error, Result};
use crate::fan::Fan;
use crate::linalg::{self, rat, Rational, RationalMatrix};
use crate::polymatroid::Polymatroid;
use crate::subset::{self, Subset};

const MAX_MONOMIALS: usize = 20_000;

struct ZRing {
    flats: Vec<Subset>,
    m: usize,
    /// `π⁻¹(F)` for each flat variable.
    rays: Vec<Subset>,
    p: Polymatroid,
    proj: crate::polymatroid::ProjectionMap,
}

impl ZRing {
    fn nvars(&self) -> usize {
        self.flats.len() + self.m
    }

    /// Subset of `Ẽ` carried by variable `v`.
    fn ray(&self, v: usize) -> Subset {
        if v < self.flats.len() {
            self.rays[v]
        } else {
            1 << (v - self.flats.len())
        }
    }

    /// Support avoids every monomial relation: flats form a chain, and for `F = ∅` and
    /// every flat of the chain, each nonempty `T ⊆ S ∖ π⁻¹(F)` has
    /// `rk(F ∪ π(T)) > rk(F) + |T|`.
    fn is_face(&self, support: &[usize]) -> bool {
        let chain: Vec<Subset> = support.iter().filter(|&&v| v < self.flats.len()).map(|&v| self.flats[v]).collect();
        for (i, &a) in chain.iter().enumerate() {
            for &b in &chain[i + 1..] {
                if !subset::is_subset(a, b) && !subset::is_subset(b, a) {
                    return false;
                }
            }
        }
        let s: Subset =
            support.iter().filter(|&&v| v >= self.flats.len()).fold(0, |acc, &v| acc | 1 << (v - self.flats.len()));
        std::iter::once(0).chain(chain.iter().copied()).all(|f| {
            let rest = s & !self.proj.preimage(f);
            subset::submasks(rest)
                .skip(1)
                .all(|t| self.p.rank(f | self.proj.image(t)) > self.p.rank(f) + subset::size(t) as u32)
        })
    }
}

/// Monomials of degree `k` in `n` variables whose support passes `is_face`.
fn face_monomials(n: usize, k: usize, is_face: &dyn Fn(&[usize]) -> bool) -> Result<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<u8>, usize)> = vec![(vec![0; n], 0)];
    while let Some((mono, last)) = stack.pop() {
        let d: usize = mono.iter().map(|&e| e as usize).sum();
        if d == k {
            out.push(mono);
            guard("face-ring monomials", out.len(), MAX_MONOMIALS)?;
            continue;
        }
        for v in last..n {
            let mut next = mono.clone();
            next[v] += 1;
            if next[v] == 1 {
                let support: Vec<usize> = (0..n).filter(|&u| next[u] > 0).collect();
                if !is_face(&support) {
                    continue;
                }
            }
            stack.push((next, v));
        }
    }
    out.sort();
    Ok(out)
}

/// Graded dimensions of the face ring modulo the linear forms `thetas`, in degrees
/// `0..=top`; degree `top` must vanish and is dropped.
fn hilbert_mod_linear(
    n: usize,
    is_face: &dyn Fn(&[usize]) -> bool,
    thetas: &[Vec<(usize, i64)>],
    top: usize,
) -> Result<Vec<usize>> {
    let mut hilbert = Vec::new();
    let mut prev: Vec<Vec<u8>> = Vec::new();
    for k in 0..=top {
        let basis = face_monomials(n, k, is_face)?;
        let index: HashMap<&Vec<u8>, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for mu in &prev {
            for theta in thetas {
                let mut row = vec![rat(0); basis.len()];
                let mut nonzero = false;
                for &(v, c) in theta {
                    let mut prod = mu.clone();
                    prod[v] += 1;
                    if let Some(&j) = index.get(&prod) {
                        row[j] += rat(c);
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
        let rank = if rows.is_empty() { 0 } else { linalg::rank(&RationalMatrix::from_rows(rows, basis.len())) };
        hilbert.push(basis.len() - rank);
        prev = basis;
    }
    if hilbert.pop() != Some(0) {
        return Err(Error::Inconsistent("face ring quotient is nonzero above the top degree".into()));
    }
    Ok(hilbert)
}

/// Hilbert function `(h_0, …, h_{r-1})` of the `z` presentation of `A(Σ_P)`; the degree
/// `r` part is checked to vanish.
pub fn z_presentation_hilbert(p: &Polymatroid) -> Result<Vec<usize>> {
    let proj = p.projection()?;
    let m = proj.m();
    let flats: Vec<Subset> =
        p.flat_lattice().flats().iter().copied().filter(|&f| f != 0 && f != p.ground()).collect();
    let rays = flats.iter().map(|&f| proj.preimage(f)).collect();
    let z = ZRing { flats, m, rays, p: p.clone(), proj };
    let r = p.total_rank() as usize;
    let n = z.nvars();
    // θ_i = L_i - L_0 with L_i = Σ_{rays ∋ i} z
    let thetas: Vec<Vec<(usize, i64)>> = (1..m)
        .map(|i| {
            (0..n)
                .filter_map(|v| {
                    let c = i64::from(subset::contains(z.ray(v), i)) - i64::from(subset::contains(z.ray(v), 0));
                    (c != 0).then_some((v, c))
                })
                .collect()
        })
        .collect();
    hilbert_mod_linear(n, &|support| z.is_face(support), &thetas, r)
}

/// Hilbert function of the Chow ring of a simplicial fan: the face ring on its rays
/// modulo the coordinate functionals `Σ_ρ ρ_j z_ρ`.
pub fn fan_chow_hilbert(fan: &Fan) -> Result<Vec<usize>> {
    let rays = fan.rays();
    let thetas: Vec<Vec<(usize, i64)>> = (0..fan.ambient_dim())
        .map(|j| rays.iter().enumerate().filter(|(_, r)| r[j] != 0).map(|(v, r)| (v, r[j])).collect())
        .collect();
    hilbert_mod_linear(rays.len(), &|support| fan.contains_cone(support), &thetas, fan.dimension() + 1)
}
