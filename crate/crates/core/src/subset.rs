//! Bitmask subsets of a small ground set `{0, …, n-1}`; bit `i` is element `i`.

use std::cmp::Ordering;

pub type Subset = u32;

/// Largest ground set any object in this crate may live on.
pub const MAX_GROUND: usize = 16;

#[inline]
pub fn full(n: usize) -> Subset {
    if n == 0 {
        0
    } else {
        (u32::MAX) >> (32 - n)
    }
}

#[inline]
pub fn size(s: Subset) -> usize {
    s.count_ones() as usize
}

#[inline]
pub fn contains(s: Subset, i: usize) -> bool {
    s >> i & 1 == 1
}

#[inline]
pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// Order by (cardinality, numeric value).
pub fn canonical_cmp(a: &Subset, b: &Subset) -> Ordering {
    (size(*a), *a).cmp(&(size(*b), *b))
}

pub fn sort_canonical(v: &mut [Subset]) {
    v.sort_by(canonical_cmp);
}

/// Elements of `s` in increasing order.
pub fn elements(s: Subset) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

/// All submasks of `s`, including `0` and `s`, in increasing numeric order.
pub fn submasks(s: Subset) -> impl Iterator<Item = Subset> {
    let mut next = Some(0u32);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == s { None } else { Some(((cur | !s).wrapping_add(1)) & s) };
        Some(cur)
    })
}

/// Re-index the elements of `sub ⊆ universe` as `0..|universe|` (in increasing order).
pub fn compress(sub: Subset, universe: Subset) -> Subset {
    let mut out = 0;
    for (k, e) in elements(universe).enumerate() {
        if contains(sub, e) {
            out |= 1 << k;
        }
    }
    out
}

/// Inverse of [`compress`].
pub fn expand(sub: Subset, universe: Subset) -> Subset {
    let mut out = 0;
    for (k, e) in elements(universe).enumerate() {
        if contains(sub, k) {
            out |= 1 << e;
        }
    }
    out
}

pub fn from_elements<I: IntoIterator<Item = usize>>(it: I) -> Subset {
    it.into_iter().fold(0, |acc, i| acc | 1 << i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks_enumerates_all() {
        let v: Vec<_> = submasks(0b101).collect();
        assert_eq!(v, vec![0, 1, 4, 5]);
        assert_eq!(submasks(0).count(), 1);
        assert_eq!(submasks(full(5)).count(), 32);
    }

    #[test]
    fn compress_expand_roundtrip() {
        let u = 0b1011_0100;
        for s in submasks(u) {
            assert_eq!(expand(compress(s, u), u), s);
        }
        assert_eq!(compress(0b1000_0100, u), 0b1001);
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![0b11, 0b100, 0b1, 0, 0b10];
        sort_canonical(&mut v);
        assert_eq!(v, vec![0, 0b1, 0b10, 0b100, 0b11]);
    }

    #[test]
    fn full_masks() {
        assert_eq!(full(0), 0);
        assert_eq!(full(3), 0b111);
        assert_eq!(full(32), u32::MAX);
    }
}
