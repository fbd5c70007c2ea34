//! Sparse polynomials with exponent-vector monomials under lexicographic order, where
//! variable 0 is the largest.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

/// Exponent vector. The derived `Ord` is lex order with variable 0 largest.
pub type Monomial = Vec<u8>;

pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + fmt::Display
{
}

impl Coeff for BigInt {}
impl Coeff for BigRational {}

pub fn degree(m: &Monomial) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

pub fn divides(a: &Monomial, b: &Monomial) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `b / a`; `a` must divide `b`.
pub fn mono_div(b: &Monomial, a: &Monomial) -> Monomial {
    b.iter().zip(a).map(|(y, x)| y - x).collect()
}

pub fn mono_lcm(a: &Monomial, b: &Monomial) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn variable(nvars: usize, v: usize) -> Monomial {
    let mut m = vec![0; nvars];
    m[v] = 1;
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(vec![0; nvars], C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let nvars = m.len();
        let mut p = Poly::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        Self::monomial(variable(nvars, v), C::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, k: &C) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone() * k.clone());
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = Poly::zero(self.nvars);
        out.add_scaled(self, k);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-C::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(mono_mul(a, b), x.clone() * y.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| (mono_mul(a, m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Poly::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Replace variable `v` by `expr` everywhere.
    pub fn substitute(&self, v: usize, expr: &Self) -> Self {
        let mut out = Poly::zero(self.nvars);
        let mut powers: Vec<Self> = vec![Poly::one(self.nvars)];
        for (m, c) in &self.terms {
            let e = m[v] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(expr);
                powers.push(next);
            }
            let mut rest = m.clone();
            rest[v] = 0;
            out.add_scaled(&powers[e].mul_monomial(&rest), c);
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Largest total degree of a term, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(degree).max()
    }

    /// Renders with variable names supplied by `name`.
    pub fn render(&self, name: impl Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mono = render_monomial(m, &name);
                if mono.is_empty() {
                    format!("{c}")
                } else if c.is_one() {
                    mono
                } else if (-c.clone()).is_one() {
                    format!("-{mono}")
                } else {
                    format!("{c}*{mono}")
                }
            })
            .collect();
        parts.join(" + ").replace("+ -", "- ")
    }
}

pub fn render_monomial(m: &Monomial, name: impl Fn(usize) -> String) -> String {
    m.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { name(v) } else { format!("{}^{e}", name(v)) })
        .collect::<Vec<_>>()
        .join("*")
}
