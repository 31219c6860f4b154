//! Independent verification of the graded run: build the integer d1 matrices
//! on a truncated window of the actual basis (key, v1h power, v2 power),
//! clear the odd denominators, and read homology off Smith normal form.
//! Inside the trusted sub-window the Z/2 summand counts must agree with the
//! graded page.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::bss::graded::{space_keys, Space};
use crate::bss::snf::{rank, smith_diagonal, IntMatrix};
use crate::coeff::{CoeffElement, DEGREE_PERIOD};
use crate::error::Result;
use crate::local2::Local2Rational;
use crate::par;
use crate::smash::{MonomialKey, SmashCtx, SmashElement};
use crate::unitary::{expand_w, SymKey};

/// One basis monomial of the truncated window.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct BasisMonomial {
    pub key_idx: usize,
    pub v1: u32,
    pub v2: u8,
}

/// The truncated complex for one space: keys, the exact d1 images of each
/// key split into the (1 - c) and (1 + c) halves, and the window caps.
pub struct WindowComplex {
    pub space: Space,
    pub n: usize,
    pub max_len: u32,
    pub v1_cap: u32,
    keys: Vec<MonomialKey>,
    key_index: BTreeMap<crate::smash::KeyOrd, usize>,
    /// v2^-3 (z - c z) and v2^-3 (z + c z) per key; d1 of v1h^a v2^b z is the
    /// first with even b, the second with odd b, scaled by the monomial.
    minus: Vec<SmashElement>,
    plus: Vec<SmashElement>,
}

/// Homology summary at one degree mod 48.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub degree: i32,
    pub dim: usize,
    /// Number of Z/2 summands.
    pub z2: usize,
    /// Number of summands of order 4 or more (2-locally); zero in any
    /// trusted window.
    pub higher: usize,
    pub free_rank: usize,
}

impl WindowComplex {
    pub fn build(space: Space, n: usize, max_len: u32, v1_cap: u32, ctx: &SmashCtx) -> Result<Self> {
        assert!(ctx.trunc >= max_len);
        let keys = space_keys(space, n, max_len);
        let key_index: BTreeMap<_, _> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (crate::smash::KeyOrd(k.clone()), i))
            .collect();
        let halves: Vec<(SmashElement, SmashElement)> = par::map_collect(&keys, |key| {
            let z = match space {
                Space::Smash => SmashElement::monomial(n, max_len, key.clone(), CoeffElement::one()),
                Space::Mu => {
                    // expand at the window truncation: lengths beyond it drop
                    let w = expand_w(&SymKey::new(key.clone()).unwrap(), ctx);
                    let mut t = SmashElement::zero(n, max_len);
                    for (k, c) in w.terms() {
                        t.add_term(k.clone(), c);
                    }
                    t
                }
            };
            let c = z.conj(ctx);
            let minus = z.sub(&c).mul_by(crate::smash::Gen::V2(-3)).unwrap();
            let plus = z.add(&c).mul_by(crate::smash::Gen::V2(-3)).unwrap();
            (minus, plus)
        });
        let (minus, plus) = halves.into_iter().unzip();
        Ok(WindowComplex { space, n, max_len, v1_cap, keys, key_index, minus, plus })
    }

    pub fn keys(&self) -> &[MonomialKey] {
        &self.keys
    }

    /// All basis monomials of one degree mod 48, in a fixed order.
    pub fn basis_at(&self, degree: i32) -> Vec<BasisMonomial> {
        let want = degree.rem_euclid(DEGREE_PERIOD);
        let mut out = Vec::new();
        for (key_idx, key) in self.keys.iter().enumerate() {
            let kd = key.degree();
            for v1 in 0..=self.v1_cap {
                for v2 in 0..8u8 {
                    let d = (kd + 16 * v1 as i32 - 6 * v2 as i32).rem_euclid(DEGREE_PERIOD);
                    if d == want {
                        out.push(BasisMonomial { key_idx, v1, v2 });
                    }
                }
            }
        }
        out
    }

    /// The d1 matrix from the degree-d basis to the degree-(d+18) basis,
    /// with odd denominators cleared column by column.
    pub fn d1_matrix(&self, degree: i32) -> IntMatrix {
        let domain = self.basis_at(degree);
        let codomain = self.basis_at(degree + 18);
        let index: BTreeMap<BasisMonomial, usize> = codomain
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, b)| (b, i))
            .collect();
        let mut m = IntMatrix::zero(codomain.len(), domain.len());
        for (col, bm) in domain.iter().enumerate() {
            let image = if bm.v2 % 2 == 0 { &self.minus[bm.key_idx] } else { &self.plus[bm.key_idx] };
            // collect the rational column, then clear denominators
            let mut entries: Vec<(usize, Local2Rational)> = Vec::new();
            for (k, coeff) in image.terms() {
                if self.space == Space::Mu && !k.property_a() {
                    continue; // coordinates in the w-basis sit on property-A keys
                }
                let Some(&key_idx) = self.key_index.get(&crate::smash::KeyOrd(k.clone())) else {
                    continue;
                };
                for (mono, q) in coeff.terms() {
                    let v1 = mono.v1 + bm.v1;
                    if v1 > self.v1_cap {
                        continue; // quotient by the v1h cap
                    }
                    let v2 = ((mono.v2 + bm.v2) % 8) as u8;
                    let target = BasisMonomial { key_idx, v1, v2 };
                    let row = *index.get(&target).expect("degree bookkeeping is off");
                    entries.push((row, q.clone()));
                }
            }
            let mut lcm = BigInt::one();
            for (_, q) in &entries {
                lcm = lcm.lcm(q.denominator());
            }
            for (row, q) in entries {
                let v = q.numerator() * (&lcm / q.denominator());
                let cur = m.get(row, col) + v;
                m.set(row, col, cur);
            }
        }
        m
    }

    /// Homology of the truncated complex at one degree: free rank and
    /// torsion summands read from Smith normal form.
    pub fn homology_at(&self, degree: i32) -> DegreeHomology {
        let dim = self.basis_at(degree).len();
        let m_out = self.d1_matrix(degree);
        let m_in = self.d1_matrix(degree - 18);
        let r_out = rank(m_out);
        let divisors = smith_diagonal(m_in);
        let r_in = divisors.len();
        let mut z2 = 0usize;
        let mut higher = 0usize;
        for d in &divisors {
            let mut v = 0u32;
            let mut x = d.clone();
            while x.is_even() {
                x /= 2;
                v += 1;
            }
            match v {
                0 => {}
                1 => z2 += 1,
                _ => higher += 1,
            }
        }
        DegreeHomology {
            degree: degree.rem_euclid(DEGREE_PERIOD),
            dim,
            z2,
            higher,
            free_rank: dim - r_out - r_in,
        }
    }

    /// Homology at every degree mod 48.
    pub fn homology_all(&self) -> Vec<DegreeHomology> {
        let degrees: Vec<i32> = (0..DEGREE_PERIOD).step_by(2).collect();
        par::map_collect(&degrees, |d| self.homology_at(*d))
    }
}

/// Z/2 dimension of the graded E2 page per degree mod 48, counted over the
/// same window as the exact complex: keys up to `max_len`, v1h exponents up
/// to `v1_cap` on free blocks.
pub fn graded_dimensions(
    entries: &[(MonomialKey, crate::bss::graded::Tag)],
    max_len: u32,
    v1_cap: u32,
) -> BTreeMap<i32, usize> {
    use crate::bss::graded::Tag;
    let mut out: BTreeMap<i32, usize> = BTreeMap::new();
    for (key, tag) in entries {
        if key.length() > max_len {
            continue;
        }
        let voe = key.voe();
        let amax = match tag {
            Tag::Free => v1_cap,
            Tag::Capped => 0,
        };
        for m in 0..4u8 {
            let b = (voe + 2 * m) % 8;
            for a in 0..=amax {
                let d = (key.degree() + 16 * a as i32 - 6 * b as i32).rem_euclid(DEGREE_PERIOD);
                *out.entry(d).or_default() += 1;
            }
        }
    }
    out
}
