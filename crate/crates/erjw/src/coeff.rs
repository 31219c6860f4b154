//! The coefficient ring E(2)* after periodicity normalization: with v2h = 1
//! we have v2^8 = 1, and the ring becomes Z_(2)[v1h]{v2^0..v2^7}, graded over
//! Z/48 with |v1h| = 16 and |v2| = -6. The complex-conjugation involution c
//! fixes v1h and negates v2.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::local2::Local2Rational;

pub const DEGREE_PERIOD: i32 = 48;

/// v1h^v1 * v2^v2 with the v2 exponent always stored reduced mod 8.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CoeffMonomial {
    pub v1: u32,
    pub v2: u8,
}

impl CoeffMonomial {
    pub fn new(v1: u32, v2: i32) -> Self {
        CoeffMonomial { v1, v2: v2.rem_euclid(8) as u8 }
    }

    pub fn one() -> Self {
        CoeffMonomial { v1: 0, v2: 0 }
    }

    /// Degree mod 48: 16*v1 - 6*v2.
    pub fn degree(&self) -> i32 {
        (16 * self.v1 as i32 - 6 * self.v2 as i32).rem_euclid(DEGREE_PERIOD)
    }
}

/// A finitely supported Z_(2)-combination of coefficient monomials.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CoeffElement {
    terms: BTreeMap<CoeffMonomial, Local2Rational>,
}

impl CoeffElement {
    pub fn zero() -> Self {
        CoeffElement::default()
    }

    pub fn one() -> Self {
        Self::monomial(CoeffMonomial::one(), Local2Rational::one())
    }

    pub fn monomial(m: CoeffMonomial, c: Local2Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        CoeffElement { terms }
    }

    pub fn v1h(exp: u32) -> Self {
        Self::monomial(CoeffMonomial::new(exp, 0), Local2Rational::one())
    }

    pub fn v2(exp: i32) -> Self {
        Self::monomial(CoeffMonomial::new(0, exp), Local2Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::monomial(CoeffMonomial::one(), Local2Rational::from_integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CoeffMonomial, &Local2Rational)> {
        self.terms.iter()
    }

    pub fn coeff_of(&self, m: &CoeffMonomial) -> Local2Rational {
        self.terms.get(m).cloned().unwrap_or_else(Local2Rational::zero)
    }

    pub fn add_term(&mut self, m: CoeffMonomial, c: &Local2Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Local2Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in rhs.terms() {
            out.add_term(*m, c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        CoeffElement { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, c: &Local2Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        CoeffElement { terms: self.terms.iter().map(|(m, q)| (*m, q * c)).collect() }
    }

    /// Product with v2 exponents reduced mod 8.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                let m = CoeffMonomial::new(a.v1 + b.v1, a.v2 as i32 + b.v2 as i32);
                out.add_term(m, &(ca * cb));
            }
        }
        out
    }

    /// Multiply by v2^k (k may be negative; v2^-1 = v2^7).
    pub fn mul_v2_pow(&self, k: i32) -> Self {
        CoeffElement {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (CoeffMonomial::new(m.v1, m.v2 as i32 + k), c.clone()))
                .collect(),
        }
    }

    pub fn mul_v1h(&self, k: u32) -> Self {
        CoeffElement {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (CoeffMonomial::new(m.v1 + k, m.v2 as i32), c.clone()))
                .collect(),
        }
    }

    /// The ring involution c: fixes v1h, negates v2.
    pub fn conj(&self) -> Self {
        CoeffElement {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, if m.v2 % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Degree mod 48 of a nonzero homogeneous element; `None` when zero or
    /// when terms of mixed degree are present.
    pub fn degree(&self) -> Option<i32> {
        let mut deg = None;
        for m in self.terms.keys() {
            match deg {
                None => deg = Some(m.degree()),
                Some(d) if d == m.degree() => {}
                Some(_) => return None,
            }
        }
        deg
    }

    /// Homogeneity check that treats zero as homogeneous of every degree.
    pub fn is_homogeneous_of(&self, d: i32) -> bool {
        self.is_zero() || self.degree() == Some(d.rem_euclid(DEGREE_PERIOD))
    }

    /// Uniform v2 exponent across all terms, if there is one.
    pub fn v2_uniform(&self) -> Option<u8> {
        let mut it = self.terms.keys();
        let first = it.next()?.v2;
        it.all(|m| m.v2 == first).then_some(first)
    }

    /// The set of v1h exponents whose coefficient is an odd unit (nonzero mod 2),
    /// ignoring v2 exponents. This is the shape the graded engine consumes.
    pub fn v1_levels_mod2(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .terms
            .iter()
            .filter(|(_, c)| c.is_odd_unit())
            .map(|(m, _)| m.v1)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    serde_json::json!({"c": c.to_string(), "v1": m.v1, "v2": m.v2})
                })
                .collect(),
        )
    }
}

impl fmt::Display for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let unit = m.v1 == 0 && m.v2 == 0;
            if !unit && c == &Local2Rational::one() {
                // suppress the 1 in front of a monomial
            } else {
                write!(f, "{c}")?;
                if !unit {
                    write!(f, " ")?;
                }
            }
            if m.v1 == 1 {
                write!(f, "v1h")?;
            } else if m.v1 > 1 {
                write!(f, "v1h^{}", m.v1)?;
            }
            if m.v1 > 0 && m.v2 > 0 {
                write!(f, " ")?;
            }
            if m.v2 == 1 {
                write!(f, "v2")?;
            } else if m.v2 > 1 {
                write!(f, "v2^{}", m.v2)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// x^r-torsion order label with an optional naming hint. The element x itself
/// is never modeled as a ring element, only as a torsion order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionLabel {
    pub order: u8,
    pub name_hint: Option<String>,
}

impl TorsionLabel {
    pub fn new(order: u8, hint: impl Into<Option<String>>) -> Self {
        assert!(matches!(order, 1 | 3 | 7), "torsion order must be 1, 3 or 7");
        TorsionLabel { order, name_hint: hint.into() }
    }
}

/// One page of the coefficient Bockstein spectral sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointPage {
    pub page: u8,
    /// Surviving v2 powers and the ring they span over.
    pub blocks: Vec<(String, Vec<u8>)>,
    /// Torsion generators detected entering this page.
    pub torsion: Vec<(TorsionLabel, String)>,
}

/// The Bockstein spectral sequence on the coefficients: three steps,
/// d1(v2) = 2 v2^-2, d3(v2^2) = v1h v2^-4, d7(v2^4) = 1, ending at E8 = 0.
pub fn point_bss() -> Vec<PointPage> {
    let mut pages = Vec::new();
    pages.push(PointPage {
        page: 1,
        blocks: vec![("Z(2)[v1h]".into(), (0..8).collect())],
        torsion: vec![],
    });
    // d1 pairs v2^b (b odd) with 2 v2^(b-3); survivors are the even powers mod 2.
    pages.push(PointPage {
        page: 2,
        blocks: vec![("Z/2[v1h]".into(), vec![0, 2, 4, 6])],
        torsion: vec![(
            TorsionLabel::new(1, Some("alpha_i".into())),
            "Z(2)[v1h]{2 v2^{0,2,4,6}}".into(),
        )],
    });
    // d3 pairs v2^2 with v1h v2^-4 = v1h v2^4 and v2^6 with v1h; survivors v2^{0,4} over Z/2.
    pages.push(PointPage {
        page: 4,
        blocks: vec![("Z/2".into(), vec![0, 4])],
        torsion: vec![(
            TorsionLabel::new(3, Some("v1h-multiple".into())),
            "Z/2[v1h]{v1h v2^{0,4}}".into(),
        )],
    });
    // d7(v2^4) = 1 kills the rest.
    pages.push(PointPage {
        page: 8,
        blocks: vec![],
        torsion: vec![(TorsionLabel::new(7, None), "Z/2".into())],
    });
    pages
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conj_basics() {
        let v2 = CoeffElement::v2(1);
        assert_eq!(v2.conj(), v2.neg());
        let v1h = CoeffElement::v1h(1);
        assert_eq!(v1h.conj(), v1h);
        let z = CoeffElement::monomial(
            CoeffMonomial::new(2, 3),
            Local2Rational::normalize(3, 7).unwrap(),
        );
        assert_eq!(z.conj(), z.neg());
    }

    #[test]
    fn v2_periodicity() {
        let v24 = CoeffElement::v2(4);
        assert_eq!(v24.mul(&v24), CoeffElement::one());
        // v1h * v2^4 is the image of w
        let w = CoeffElement::v1h(1).mul(&CoeffElement::v2(4));
        assert_eq!(w.degree(), Some((16 - 24i32).rem_euclid(48)));
        assert_eq!(CoeffElement::zero().mul(&w), CoeffElement::zero());
    }

    #[test]
    fn point_bss_matches_reference_tables() {
        let pages = point_bss();
        let by_page = |p: u8| pages.iter().find(|pp| pp.page == p).unwrap();
        assert_eq!(by_page(2).blocks, vec![("Z/2[v1h]".to_string(), vec![0, 2, 4, 6])]);
        assert!(by_page(8).blocks.is_empty());
        assert_eq!(by_page(4).torsion[0].1, "Z/2[v1h]{v1h v2^{0,4}}");
    }

    #[test]
    fn rendering() {
        let mut z = CoeffElement::monomial(
            CoeffMonomial::new(2, 3),
            Local2Rational::normalize(3, 7).unwrap(),
        );
        assert_eq!(z.to_string(), "3/7 v1h^2 v2^3");
        z.add_term(CoeffMonomial::one(), &Local2Rational::from_integer(2));
        assert_eq!(z.to_string(), "2 + 3/7 v1h^2 v2^3");
        assert_eq!(CoeffElement::v1h(1).to_string(), "v1h");
    }

    fn arb_coeff() -> impl Strategy<Value = CoeffElement> {
        proptest::collection::vec((0u32..4, 0i32..8, -20i64..20, 0u8..6), 0..5).prop_map(|ts| {
            let mut z = CoeffElement::zero();
            for (v1, v2, n, d) in ts {
                z.add_term(
                    CoeffMonomial::new(v1, v2),
                    &Local2Rational::normalize(n, 2 * d as i64 + 1).unwrap(),
                );
            }
            z
        })
    }

    proptest! {
        #[test]
        fn conj_is_involutive_ring_hom(a in arb_coeff(), b in arb_coeff()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
        }

        #[test]
        fn degree_additive_mod_48(a in arb_coeff(), b in arb_coeff()) {
            // restrict to homogeneous inputs
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                if !a.is_zero() && !b.is_zero() {
                    let p = a.mul(&b);
                    if !p.is_zero() {
                        prop_assert_eq!(p.degree(), Some((da + db).rem_euclid(48)));
                    }
                }
            }
        }
    }
}
