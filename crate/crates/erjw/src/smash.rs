//! The truncated module E(2)*(smash^n CP^infinity) on the monomial basis
//! ph^I uh^eps, the order and filtration on keys, and the exact Bockstein
//! differential d1(y) = v2^-3 (1 - c)(y).
//!
//! Keys are not forced to satisfy the smash condition i_k + eps_k > 0:
//! intermediate expressions (Chern class expansions in particular) need
//! factors with empty slots. The engine restricts its basis enumeration to
//! keys that do satisfy it.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::coeff::{CoeffElement, DEGREE_PERIOD};
use crate::error::{Error, Result};
use crate::fgl::{self, CanonicalPair, USeries};

/// Exponent data (I, eps) for ph^I uh^eps. The derived ordering is plain
/// structural comparison for use in sets; the filtration order lives in
/// [`order_compare`] and [`KeyOrd`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MonomialKey {
    pub i: Vec<u32>,
    pub eps: Vec<bool>,
}

impl MonomialKey {
    pub fn new(i: Vec<u32>, eps: Vec<bool>) -> Self {
        assert_eq!(i.len(), eps.len());
        MonomialKey { i, eps }
    }

    pub fn n(&self) -> usize {
        self.i.len()
    }

    pub fn s_i(&self) -> u32 {
        self.i.iter().sum()
    }

    pub fn s_eps(&self) -> u32 {
        self.eps.iter().map(|&e| e as u32).sum()
    }

    /// Length 2 s(I) + s(eps), the primary filtration quantity.
    pub fn length(&self) -> u32 {
        2 * self.s_i() + self.s_eps()
    }

    /// 2 i_k + eps_k at position k (0-based).
    pub fn weight(&self, k: usize) -> u32 {
        2 * self.i[k] + self.eps[k] as u32
    }

    /// Smash-product membership: every factor carries something.
    pub fn smash_condition(&self) -> bool {
        (0..self.n()).all(|k| self.weight(k) > 0)
    }

    /// Weakly decreasing weights, all positive.
    pub fn property_a(&self) -> bool {
        self.smash_condition()
            && (1..self.n()).all(|k| self.weight(k - 1) >= self.weight(k))
    }

    /// Parity of s(eps): decides the v2^{o/e} bookkeeping factor.
    pub fn voe(&self) -> u8 {
        (self.s_eps() % 2) as u8
    }

    /// Degree mod 48 contributed by the key itself (uh: -16, ph: -32).
    pub fn degree(&self) -> i32 {
        (-32 * self.s_i() as i32 - 16 * self.s_eps() as i32).rem_euclid(DEGREE_PERIOD)
    }

    /// The key with i_j raised by one (0-based j).
    pub fn bump_i(&self, j: usize) -> MonomialKey {
        let mut i = self.i.clone();
        i[j] += 1;
        MonomialKey { i, eps: self.eps.clone() }
    }

    /// The key with eps_j cleared.
    pub fn clear_eps(&self, j: usize) -> MonomialKey {
        let mut eps = self.eps.clone();
        eps[j] = false;
        MonomialKey { i: self.i.clone(), eps }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "I": self.i,
            "eps": self.eps.iter().map(|&e| e as u8).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for MonomialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for k in 0..self.n() {
            if self.i[k] > 0 {
                if wrote {
                    write!(f, " ")?;
                }
                if self.i[k] == 1 {
                    write!(f, "p{}", k + 1)?;
                } else {
                    write!(f, "p{}^{}", k + 1, self.i[k])?;
                }
                wrote = true;
            }
            if self.eps[k] {
                if wrote {
                    write!(f, " ")?;
                }
                write!(f, "u{}", k + 1)?;
                wrote = true;
            }
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// The total order on keys: compare lengths first; on ties scan the weights
/// 2 i_k + eps_k from the top coordinate down, the first difference decides.
/// Equal everywhere means identical keys, since the weight determines the
/// pair (i_k, eps_k).
pub fn order_compare(a: &MonomialKey, b: &MonomialKey) -> Ordering {
    debug_assert_eq!(a.n(), b.n());
    match a.length().cmp(&b.length()) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for k in (0..a.n()).rev() {
        match a.weight(k).cmp(&b.weight(k)) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// Wrapper giving keys the filtration order, for use in ordered maps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KeyOrd(pub MonomialKey);

impl PartialOrd for KeyOrd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KeyOrd {
    fn cmp(&self, other: &Self) -> Ordering {
        order_compare(&self.0, &other.0)
    }
}

/// Shared per-run context: the conjugation and ph data at a fixed truncation,
/// computed once and then only read.
#[derive(Clone, Debug)]
pub struct SmashCtx {
    pub n: usize,
    pub trunc: u32,
    /// c(uh) in canonical A(ph) + B(ph) uh form.
    pub conj_pair: CanonicalPair,
    /// c(uh) as a raw uh-series.
    pub conj_raw: USeries,
    /// ph = uh c(uh).
    pub phat: USeries,
    /// Canonical form of uh^m for m = 0..=trunc (index m). Entry 0 is 1.
    pub upow: Vec<CanonicalPair>,
}

impl SmashCtx {
    pub fn new(n: usize, trunc: u32) -> Result<Self> {
        assert!(n >= 1);
        let conj_raw = fgl::conjugate_u(trunc)?;
        let conj_pair = fgl::canonicalize(&fgl::UniElem::from_useries(&conj_raw), &conj_raw)?;
        let phat = conj_raw.shift_up();
        let mut upow = Vec::with_capacity(trunc as usize + 1);
        for m in 0..=trunc {
            let z = if m == 0 {
                let mut z = fgl::UniElem::zero(trunc);
                z.add_term(0, 0, &CoeffElement::one());
                z
            } else {
                fgl::UniElem::monomial(trunc, 0, m, CoeffElement::one())
            };
            upow.push(fgl::canonicalize(&z, &conj_raw)?);
        }
        Ok(SmashCtx { n, trunc, conj_pair, conj_raw, phat, upow })
    }
}

/// A finitely supported combination of basis monomials with coefficients in
/// the normalized ring. Terms beyond the truncation length are dropped at
/// construction time; consumers own the margin bookkeeping.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SmashElement {
    pub n: usize,
    pub trunc: u32,
    terms: BTreeMap<KeyOrd, CoeffElement>,
}

/// Generators the module multiplies by.
#[derive(Clone, Copy, Debug)]
pub enum Gen {
    V1h,
    /// v2^k, k possibly negative.
    V2(i32),
    /// ph_j, 0-based factor index.
    Phat(usize),
}

impl SmashElement {
    pub fn zero(n: usize, trunc: u32) -> Self {
        SmashElement { n, trunc, terms: BTreeMap::new() }
    }

    pub fn monomial(n: usize, trunc: u32, key: MonomialKey, c: CoeffElement) -> Self {
        let mut z = Self::zero(n, trunc);
        z.add_term(key, &c);
        z
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &CoeffElement)> {
        self.terms.iter().map(|(k, c)| (&k.0, c))
    }

    pub fn coeff_of(&self, key: &MonomialKey) -> CoeffElement {
        self.terms
            .get(&KeyOrd(key.clone()))
            .cloned()
            .unwrap_or_else(CoeffElement::zero)
    }

    pub fn add_term(&mut self, key: MonomialKey, c: &CoeffElement) {
        debug_assert_eq!(key.n(), self.n);
        if c.is_zero() || key.length() > self.trunc {
            return;
        }
        let entry = self
            .terms
            .entry(KeyOrd(key))
            .or_insert_with(CoeffElement::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            // remove the key we just touched
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.trunc = self.trunc.min(rhs.trunc);
        for (k, c) in rhs.terms() {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        SmashElement {
            n: self.n,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, q: &CoeffElement) -> Self {
        let mut out = Self::zero(self.n, self.trunc);
        for (k, c) in self.terms() {
            out.add_term(k.clone(), &c.mul(q));
        }
        out
    }

    /// Multiplication by a single generator. ph_j shifts I by the unit
    /// displacement at j; an overflow past the truncation is an error rather
    /// than a silent drop because callers use this to build basis elements.
    pub fn mul_by(&self, g: Gen) -> Result<Self> {
        let mut out = Self::zero(self.n, self.trunc);
        for (k, c) in self.terms() {
            match g {
                Gen::V1h => out.add_term(k.clone(), &c.mul_v1h(1)),
                Gen::V2(e) => out.add_term(k.clone(), &c.mul_v2_pow(e)),
                Gen::Phat(j) => {
                    let nk = k.bump_i(j);
                    if nk.length() > self.trunc {
                        return Err(Error::TruncationExceeded {
                            needed: nk.length(),
                            available: self.trunc,
                        });
                    }
                    out.add_term(nk, c);
                }
            }
        }
        Ok(out)
    }

    /// The minimal term under the filtration order.
    pub fn lead_term(&self) -> Result<(MonomialKey, CoeffElement)> {
        self.terms
            .iter()
            .next()
            .map(|(k, c)| (k.0.clone(), c.clone()))
            .ok_or(Error::ZeroElement)
    }

    /// The full ring involution: conjugate every coefficient and expand each
    /// uh_k through the cached canonical form of c(uh).
    pub fn conj(&self, ctx: &SmashCtx) -> Self {
        let mut out = Self::zero(self.n, self.trunc);
        for (key, c) in self.terms() {
            // remaining minimal weight of the factors still to process
            let mut suffix_min = vec![0u32; self.n + 1];
            for k in (0..self.n).rev() {
                // a conjugated uh contributes at least weight 1, ph^i passes through
                suffix_min[k] = suffix_min[k + 1] + key.weight(k).max(0);
            }
            let mut partial: Vec<(Vec<u32>, Vec<bool>, CoeffElement)> =
                vec![(Vec::with_capacity(self.n), Vec::with_capacity(self.n), c.conj())];
            for k in 0..self.n {
                let mut next = Vec::with_capacity(partial.len());
                for (ivec, evec, q) in partial {
                    let used: u32 =
                        2 * ivec.iter().sum::<u32>() + evec.iter().map(|&e| e as u32).sum::<u32>();
                    if !key.eps[k] {
                        let mut iv = ivec.clone();
                        let mut ev = evec.clone();
                        iv.push(key.i[k]);
                        ev.push(false);
                        next.push((iv, ev, q.clone()));
                        continue;
                    }
                    let budget = self.trunc.saturating_sub(used + suffix_min[k + 1]);
                    // A-part: uh_k -> ph_k^m, m >= 1
                    for m in 1..ctx.conj_pair.a.len() as u32 {
                        let w = 2 * (key.i[k] + m);
                        if w > budget {
                            break;
                        }
                        let am = ctx.conj_pair.a_coeff(m as usize);
                        if am.is_zero() {
                            continue;
                        }
                        let mut iv = ivec.clone();
                        let mut ev = evec.clone();
                        iv.push(key.i[k] + m);
                        ev.push(false);
                        next.push((iv, ev, q.mul(&am)));
                    }
                    // B-part: uh_k -> ph_k^m uh_k, m >= 0
                    for m in 0..ctx.conj_pair.b.len() as u32 {
                        let w = 2 * (key.i[k] + m) + 1;
                        if w > budget {
                            break;
                        }
                        let bm = ctx.conj_pair.b_coeff(m as usize);
                        if bm.is_zero() {
                            continue;
                        }
                        let mut iv = ivec.clone();
                        let mut ev = evec.clone();
                        iv.push(key.i[k] + m);
                        ev.push(true);
                        next.push((iv, ev, q.mul(&bm)));
                    }
                }
                partial = next;
            }
            for (iv, ev, q) in partial {
                out.add_term(MonomialKey::new(iv, ev), &q);
            }
        }
        out
    }

    /// d1(y) = v2^-3 (y - c(y)). Exact on every stored length; terms pushed
    /// past the truncation are dropped.
    pub fn d1(&self, ctx: &SmashCtx) -> Self {
        self.sub(&self.conj(ctx)).mul_by(Gen::V2(-3)).expect("v2 scaling cannot overflow")
    }

    /// Degree mod 48 of a nonzero homogeneous element.
    pub fn degree(&self) -> Option<i32> {
        let mut deg = None;
        for (k, c) in self.terms() {
            let cd = c.degree()?;
            let d = (cd + k.degree()).rem_euclid(DEGREE_PERIOD);
            match deg {
                None => deg = Some(d),
                Some(x) if x == d => {}
                Some(_) => return None,
            }
        }
        deg
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(k, c)| {
                let coeff = format!("{c}");
                let needs_parens = coeff.contains(" + ");
                match (needs_parens, k.length()) {
                    (true, _) => format!("({coeff}) {k}"),
                    (false, _) if coeff == "1" => format!("{k}"),
                    _ => format!("{coeff} {k}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Serialize)]
struct TermJson {
    coeff: serde_json::Value,
    key: serde_json::Value,
}

impl SmashElement {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(k, c)| {
                    serde_json::to_value(TermJson { coeff: c.to_json(), key: k.to_json() })
                        .unwrap()
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local2::Local2Rational;
    use proptest::prelude::*;

    fn key(i: &[u32], e: &[u8]) -> MonomialKey {
        MonomialKey::new(i.to_vec(), e.iter().map(|&x| x != 0).collect())
    }

    fn uh(n: usize, trunc: u32, k: usize) -> SmashElement {
        let mut i = vec![0; n];
        let mut e = vec![0u8; n];
        // the other factors must carry something for a smash basis element,
        // but tests that only exercise the algebra may leave them empty
        let _ = &mut i;
        e[k] = 1;
        SmashElement::monomial(n, trunc, key(&i, &e), CoeffElement::one())
    }

    #[test]
    fn order_examples() {
        // ((1,0),(0,1)) vs ((0,1),(1,0)): lengths 3 = 3, at top factor 1 < 2
        let a = key(&[1, 0], &[0, 1]);
        let b = key(&[0, 1], &[1, 0]);
        assert_eq!(order_compare(&a, &b), Ordering::Less);
        // ((1),(1)) vs ((2),(0)): lengths 3 < 4
        let a = key(&[1], &[1]);
        let b = key(&[2], &[0]);
        assert_eq!(order_compare(&a, &b), Ordering::Less);
        assert_eq!(order_compare(&a, &a), Ordering::Equal);
    }

    #[test]
    fn lead_term_examples() {
        let trunc = 8;
        // p1 u2 + u1 p2 -> lead p1 u2
        let mut z = SmashElement::zero(2, trunc);
        z.add_term(key(&[1, 0], &[0, 1]), &CoeffElement::one());
        z.add_term(key(&[0, 1], &[1, 0]), &CoeffElement::one());
        assert_eq!(z.lead_term().unwrap().0, key(&[1, 0], &[0, 1]));
        // v1h p1^2 + p1^2 p2 -> lead p1^2 (length 4 < 6)
        let mut z = SmashElement::zero(2, trunc);
        z.add_term(key(&[2, 0], &[0, 0]), &CoeffElement::v1h(1));
        z.add_term(key(&[2, 1], &[0, 0]), &CoeffElement::one());
        assert_eq!(z.lead_term().unwrap().0, key(&[2, 0], &[0, 0]));
        assert!(SmashElement::zero(1, 4).lead_term().is_err());
    }

    fn all_terms_even(z: &SmashElement) -> bool {
        z.terms().all(|(_, c)| c.terms().all(|(_, q)| q.val2().map_or(true, |v| v >= 1)))
    }

    #[test]
    fn d1_of_uh_mod_phat() {
        let ctx = SmashCtx::new(1, 8).unwrap();
        let z = uh(1, 8, 0);
        let d = z.d1(&ctx);
        // coefficient of uh_1 itself: 2 v2^-3
        let c = d.coeff_of(&key(&[0], &[1]));
        assert_eq!(c, CoeffElement::from_int(2).mul_v2_pow(-3));
        // d1(v2 uh) = 0 mod ph: the uh-coefficient vanishes
        let zv = z.mul_by(Gen::V2(1)).unwrap();
        let dv = zv.d1(&ctx);
        assert!(dv.coeff_of(&key(&[0], &[1])).is_zero());
    }

    #[test]
    fn d1_of_uh_long_form_mod_two() {
        let ctx = SmashCtx::new(1, 9).unwrap();
        let d = uh(1, 9, 0).d1(&ctx);
        // mod (2, ph^2 uh): v2^-3 (v1h ph + v1h^3 ph^2 + ph^2)
        let want_p1 = CoeffElement::v1h(1).mul_v2_pow(-3);
        let got_p1 = d.coeff_of(&key(&[1], &[0]));
        assert!(all_terms_even(&SmashElement::monomial(
            1,
            9,
            key(&[1], &[0]),
            got_p1.sub(&want_p1)
        )));
        let want_p2 = CoeffElement::v1h(3).add(&CoeffElement::one()).mul_v2_pow(-3);
        let got_p2 = d.coeff_of(&key(&[2], &[0]));
        assert!(all_terms_even(&SmashElement::monomial(
            1,
            9,
            key(&[2], &[0]),
            got_p2.sub(&want_p2)
        )));
        // the ph uh term is even
        assert!(d.coeff_of(&key(&[1], &[1])).terms().all(|(_, q)| q.val2().unwrap() >= 1));
    }

    #[test]
    fn d1_of_v2_phat() {
        // d1(v2 ph) = 2 v2^-2 ph mod (ph uh); in fact exactly, since c(ph) = ph
        let ctx = SmashCtx::new(1, 8).unwrap();
        let z = SmashElement::monomial(1, 8, key(&[1], &[0]), CoeffElement::v2(1));
        let d = z.d1(&ctx);
        let want = CoeffElement::from_int(2).mul_v2_pow(-2);
        assert_eq!(d.coeff_of(&key(&[1], &[0])), want);
        assert_eq!(d.num_terms(), 1);
    }

    #[test]
    fn d1_of_uh1_uh2_mod_two_length_four() {
        let ctx = SmashCtx::new(2, 8).unwrap();
        let z = SmashElement::monomial(2, 8, key(&[0, 0], &[1, 1]), CoeffElement::one());
        let d = z.d1(&ctx);
        let v1h_v25 = CoeffElement::v1h(1).mul_v2_pow(-3);
        for (k, sign) in [(key(&[1, 0], &[0, 1]), 1), (key(&[0, 1], &[1, 0]), 1)] {
            let got = d.coeff_of(&k);
            let want = if sign > 0 { v1h_v25.clone() } else { v1h_v25.neg() };
            let diff = got.sub(&want);
            assert!(
                diff.terms().all(|(_, q)| q.val2().map_or(true, |v| v >= 1)),
                "mismatch at {k}"
            );
        }
        // nothing of length < 3 appears
        for (k, _) in d.terms() {
            assert!(k.length() >= 3);
        }
    }

    #[test]
    fn d1_squared_vanishes() {
        let ctx = SmashCtx::new(2, 10).unwrap();
        let mut z = SmashElement::zero(2, 10);
        z.add_term(key(&[0, 1], &[1, 0]), &CoeffElement::v2(3));
        z.add_term(key(&[1, 0], &[0, 1]), &CoeffElement::v1h(1));
        z.add_term(key(&[0, 0], &[1, 1]), &CoeffElement::from_int(5));
        let dd = z.d1(&ctx).d1(&ctx);
        assert!(dd.is_zero(), "d1^2 left {}", dd.render());
    }

    #[test]
    fn d1_raises_degree_by_18() {
        let ctx = SmashCtx::new(2, 8).unwrap();
        let z = SmashElement::monomial(2, 8, key(&[1, 0], &[0, 1]), CoeffElement::v2(2));
        let d = z.d1(&ctx);
        let dz = z.degree().unwrap();
        assert_eq!(d.degree(), Some((dz + 18).rem_euclid(48)));
    }

    #[test]
    fn d1_commutes_with_module_generators() {
        // multiplication with drop semantics: products past the truncation
        // window are discarded on both sides before comparing
        fn mul_drop(z: &SmashElement, g: Gen) -> SmashElement {
            let mut out = SmashElement::zero(z.n, z.trunc);
            for (k, c) in z.terms() {
                match g {
                    Gen::V1h => out.add_term(k.clone(), &c.mul_v1h(1)),
                    Gen::V2(e) => out.add_term(k.clone(), &c.mul_v2_pow(e)),
                    Gen::Phat(j) => out.add_term(k.bump_i(j), c),
                }
            }
            out
        }
        let ctx = SmashCtx::new(2, 10).unwrap();
        let z = SmashElement::monomial(2, 10, key(&[0, 1], &[1, 0]), CoeffElement::one());
        for g in [Gen::V1h, Gen::V2(2), Gen::Phat(0), Gen::Phat(1)] {
            let a = mul_drop(&z, g).d1(&ctx);
            let b = mul_drop(&z.d1(&ctx), g);
            assert!(a.sub(&b).is_zero());
        }
    }

    #[test]
    fn relation_from_d1_image() {
        // v1h ph + ph^2 (1 + v1h^3) agrees with v2^3 d1(uh) mod 2 up to length 4
        let ctx = SmashCtx::new(1, 9).unwrap();
        let mut rel = SmashElement::zero(1, 9);
        rel.add_term(key(&[1], &[0]), &CoeffElement::v1h(1));
        rel.add_term(key(&[2], &[0]), &CoeffElement::one().add(&CoeffElement::v1h(3)));
        let image = uh(1, 9, 0).d1(&ctx).mul_by(Gen::V2(3)).unwrap();
        let diff = rel.sub(&image);
        for (k, c) in diff.terms() {
            if k.length() <= 4 {
                assert!(c.terms().all(|(_, q)| q.val2().map_or(true, |v| v >= 1)));
            }
        }
    }

    #[test]
    fn mul_by_examples() {
        let ctx = SmashCtx::new(1, 6).unwrap();
        let z = uh(1, 6, 0);
        let zp = z.mul_by(Gen::Phat(0)).unwrap();
        assert_eq!(zp.lead_term().unwrap().0, key(&[1], &[1]));
        let z8 = z.mul_by(Gen::V2(4)).unwrap().mul_by(Gen::V2(4)).unwrap();
        assert_eq!(z8, z);
        let zv = z.mul_by(Gen::V1h).unwrap().mul_by(Gen::V1h).unwrap();
        assert_eq!(zv.coeff_of(&key(&[0], &[1])), CoeffElement::v1h(2));
        let _ = ctx;
    }

    fn arb_key(n: usize, max_len: u32) -> impl Strategy<Value = MonomialKey> {
        proptest::collection::vec((0u32..3, any::<bool>()), n).prop_map(move |pairs| {
            let mut k = MonomialKey::new(
                pairs.iter().map(|p| p.0).collect(),
                pairs.iter().map(|p| p.1).collect(),
            );
            while k.length() > max_len {
                let j = k.i.iter().position(|&x| x > 0).unwrap_or(0);
                if k.i[j] > 0 {
                    k.i[j] -= 1;
                } else if let Some(j) = k.eps.iter().position(|&e| e) {
                    k.eps[j] = false;
                }
            }
            k
        })
    }

    proptest! {
        #[test]
        fn order_is_total(a in arb_key(3, 10), b in arb_key(3, 10), c in arb_key(3, 10)) {
            // antisymmetry
            prop_assert_eq!(order_compare(&a, &b), order_compare(&b, &a).reverse());
            // equality only for identical keys
            if order_compare(&a, &b) == Ordering::Equal {
                prop_assert_eq!(&a, &b);
            }
            // transitivity
            if order_compare(&a, &b) != Ordering::Greater
                && order_compare(&b, &c) != Ordering::Greater
            {
                prop_assert_ne!(order_compare(&a, &c), Ordering::Greater);
            }
            // compatibility with length
            if a.length() < b.length() {
                prop_assert_eq!(order_compare(&a, &b), Ordering::Less);
            }
        }

        #[test]
        fn d1_squared_zero_random(i1 in 0u32..2, e1 in 0u8..2, i2 in 0u32..2, e2 in 0u8..2, v2e in 0i32..8) {
            use std::sync::OnceLock;
            static CTX: OnceLock<SmashCtx> = OnceLock::new();
            let ctx = CTX.get_or_init(|| SmashCtx::new(2, 10).unwrap());
            let k = key(&[i1, i2], &[e1, e2]);
            if k.length() >= 1 {
                let z = SmashElement::monomial(
                    2, 10, k,
                    CoeffElement::v2(v2e).scale(&Local2Rational::from_integer(3)),
                );
                prop_assert!(z.d1(ctx).d1(ctx).is_zero());
            }
        }
    }
}
