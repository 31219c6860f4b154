//! E(2)*(MU(n)) seen inside the smash module: symmetric generators w_{I,eps}
//! with property-A lead terms, hatted Conner-Floyd Chern classes, modified
//! Pontryagin classes, and the translations between the three descriptions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coeff::CoeffElement;
use crate::error::{Error, Result};
use crate::fgl::USeries;
use crate::smash::{MonomialKey, SmashCtx, SmashElement};

/// A property-A key: weights 2 i_k + eps_k weakly decreasing and positive.
/// These index the symmetric generators w_{I,eps}.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymKey(MonomialKey);

impl SymKey {
    pub fn new(key: MonomialKey) -> Result<Self> {
        if key.property_a() {
            Ok(SymKey(key))
        } else {
            Err(Error::PropertyAViolation(key.to_string()))
        }
    }

    pub fn key(&self) -> &MonomialKey {
        &self.0
    }

    pub fn into_key(self) -> MonomialKey {
        self.0
    }
}

impl fmt::Display for SymKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w[{}]", self.0)
    }
}

/// The sum of all distinct permutations of the paired exponent list; the
/// ph_i and uh_i move together. Lead term is the key itself with unit
/// coefficient.
pub fn expand_w(key: &SymKey, ctx: &SmashCtx) -> SmashElement {
    let k = key.key();
    let n = k.n();
    let pairs: Vec<(u32, bool)> = (0..n).map(|t| (k.i[t], k.eps[t])).collect();
    let mut seen = BTreeSet::new();
    let mut out = SmashElement::zero(n, ctx.trunc);
    permute_distinct(&pairs, &mut Vec::new(), &mut seen, &mut out);
    out
}

fn permute_distinct(
    remaining: &[(u32, bool)],
    prefix: &mut Vec<(u32, bool)>,
    seen: &mut BTreeSet<Vec<(u32, bool)>>,
    out: &mut SmashElement,
) {
    if remaining.is_empty() {
        if seen.insert(prefix.clone()) {
            let key = MonomialKey::new(
                prefix.iter().map(|p| p.0).collect(),
                prefix.iter().map(|p| p.1).collect(),
            );
            out.add_term(key, &CoeffElement::one());
        }
        return;
    }
    let mut used = BTreeSet::new();
    for idx in 0..remaining.len() {
        if !used.insert(remaining[idx]) {
            continue;
        }
        let mut rest = remaining.to_vec();
        let item = rest.remove(idx);
        prefix.push(item);
        permute_distinct(&rest, prefix, seen, out);
        prefix.pop();
    }
}

/// Exponents of the hatted Chern classes ch_1 .. ch_n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChernMonomial {
    pub j: Vec<u32>,
}

impl ChernMonomial {
    pub fn new(j: Vec<u32>) -> Self {
        ChernMonomial { j }
    }

    pub fn n(&self) -> usize {
        self.j.len()
    }

    /// MU(n) membership: the top class divides the monomial.
    pub fn in_mu_ideal(&self) -> bool {
        self.j.last().is_some_and(|&t| t > 0)
    }

    /// The key with weights 2 i_k + eps_k = j_k + j_{k+1} + ... + j_n.
    /// This inverts the lead-term correspondence w -> ch.
    pub fn weights_key(&self) -> MonomialKey {
        let n = self.n();
        let mut i = vec![0u32; n];
        let mut eps = vec![false; n];
        let mut acc = 0u32;
        for k in (0..n).rev() {
            acc += self.j[k];
            i[k] = acc / 2;
            eps[k] = acc % 2 == 1;
        }
        MonomialKey::new(i, eps)
    }

    /// Parity of j_1 + j_3 + j_5 + ...; equals the parity of s(eps) of the
    /// corresponding symmetric generator and so decides v2^{o/e}.
    pub fn parity(&self) -> u8 {
        (self.j.iter().step_by(2).sum::<u32>() % 2) as u8
    }
}

impl fmt::Display for ChernMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, &e) in self.j.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if wrote {
                write!(f, " ")?;
            }
            if e == 1 {
                write!(f, "c{}", k + 1)?;
            } else {
                write!(f, "c{}^{}", k + 1, e)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Exponents of the modified Pontryagin classes Ph_1 .. Ph_n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PontryaginMonomial {
    pub k: Vec<u32>,
}

impl PontryaginMonomial {
    pub fn new(k: Vec<u32>) -> Self {
        PontryaginMonomial { k }
    }
}

/// Lead-term translation w_{I,eps} -> ch^J: j_k is the drop in weights.
pub fn w_to_chern(key: &SymKey) -> ChernMonomial {
    let k = key.key();
    let n = k.n();
    let j = (0..n)
        .map(|t| k.weight(t) - if t + 1 < n { k.weight(t + 1) } else { 0 })
        .collect();
    ChernMonomial::new(j)
}

/// The mixed presentation Ph^K ch^r with r_k <= 1, translated to the
/// property-A key via s_i = k_i + ... + k_n, e_i = r_i + ... + r_n = 2 g_i
/// + eps_i, i_m = s_m + g_m.
pub fn pontryagin_chern_key(k: &PontryaginMonomial, r: &[u8]) -> MonomialKey {
    let n = k.k.len();
    assert_eq!(r.len(), n);
    let mut i = vec![0u32; n];
    let mut eps = vec![false; n];
    let mut s = 0u32;
    let mut e = 0u32;
    for m in (0..n).rev() {
        s += k.k[m];
        e += r[m] as u32;
        i[m] = s + e / 2;
        eps[m] = e % 2 == 1;
    }
    MonomialKey::new(i, eps)
}

/// Intermediate representation for products of symmetric polynomials: a
/// combination of plain uh-exponent vectors, one exponent per factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UExpElem {
    pub n: usize,
    pub trunc: u32,
    pub terms: BTreeMap<Vec<u32>, CoeffElement>,
}

impl UExpElem {
    pub fn zero(n: usize, trunc: u32) -> Self {
        UExpElem { n, trunc, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, trunc: u32) -> Self {
        let mut z = Self::zero(n, trunc);
        z.add_term(vec![0; n], &CoeffElement::one());
        z
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: &CoeffElement) {
        if c.is_zero() || exps.iter().sum::<u32>() > self.trunc {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(CoeffElement::zero);
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.n, self.trunc.min(rhs.trunc));
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let exps: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(exps, &ca.mul(cb));
            }
        }
        out
    }

    /// The k-th elementary symmetric polynomial in uh_1..uh_n, i.e. the
    /// image of ch_k.
    pub fn elementary(n: usize, trunc: u32, k: usize) -> Self {
        let mut out = Self::zero(n, trunc);
        for subset in subsets_of_size(n, k) {
            let mut exps = vec![0u32; n];
            for t in subset {
                exps[t] = 1;
            }
            out.add_term(exps, &CoeffElement::one());
        }
        out
    }

    /// Apply the conjugation: coefficients through c, every uh_t through the
    /// exact series c(uh).
    pub fn conj(&self, ctx: &SmashCtx) -> Self {
        // powers of the conjugate series, index e-1 for exponent e
        let mut spow: Vec<USeries> = vec![ctx.conj_raw.clone()];
        for _ in 1..self.trunc as usize {
            spow.push(spow.last().unwrap().mul(&ctx.conj_raw));
        }
        let mut out = Self::zero(self.n, self.trunc);
        for (exps, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, CoeffElement)> = vec![(Vec::new(), c.conj())];
            for t in 0..self.n {
                let e = exps[t];
                let mut next = Vec::new();
                for (vec_so_far, q) in &partial {
                    let used: u32 = vec_so_far.iter().sum();
                    if e == 0 {
                        let mut v = vec_so_far.clone();
                        v.push(0);
                        next.push((v, q.clone()));
                        continue;
                    }
                    let series = &spow[e as usize - 1];
                    for m in e..=self.trunc.saturating_sub(used) {
                        let cm = series.coeff(m);
                        if cm.is_zero() {
                            continue;
                        }
                        let mut v = vec_so_far.clone();
                        v.push(m);
                        next.push((v, q.mul(cm)));
                    }
                }
                partial = next;
            }
            for (v, q) in partial {
                out.add_term(v, &q);
            }
        }
        out
    }

    /// Canonicalize every factor: uh_t^m becomes A_m(ph_t) + B_m(ph_t) uh_t.
    pub fn to_smash(&self, ctx: &SmashCtx) -> SmashElement {
        let mut out = SmashElement::zero(self.n, self.trunc);
        for (exps, c) in &self.terms {
            let mut partial: Vec<(Vec<u32>, Vec<bool>, CoeffElement)> = vec![(
                Vec::with_capacity(self.n),
                Vec::with_capacity(self.n),
                c.clone(),
            )];
            for t in 0..self.n {
                let m = exps[t] as usize;
                let pair = &ctx.upow[m];
                let mut next = Vec::new();
                for (iv, ev, q) in &partial {
                    let used: u32 =
                        2 * iv.iter().sum::<u32>() + ev.iter().map(|&b| b as u32).sum::<u32>();
                    let budget = self.trunc.saturating_sub(used);
                    for (p, a) in pair.a.iter().enumerate() {
                        if 2 * p as u32 > budget || a.is_zero() {
                            continue;
                        }
                        let mut niv = iv.clone();
                        let mut nev = ev.clone();
                        niv.push(p as u32);
                        nev.push(false);
                        next.push((niv, nev, q.mul(a)));
                    }
                    for (p, b) in pair.b.iter().enumerate() {
                        if 2 * p as u32 + 1 > budget || b.is_zero() {
                            continue;
                        }
                        let mut niv = iv.clone();
                        let mut nev = ev.clone();
                        niv.push(p as u32);
                        nev.push(true);
                        next.push((niv, nev, q.mul(b)));
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
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for t in start..n {
            cur.push(t);
            rec(t + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exact image of ch^J in the smash module.
pub fn chern_to_smash(c: &ChernMonomial, ctx: &SmashCtx) -> SmashElement {
    let n = c.n();
    let mut acc = UExpElem::one(n, ctx.trunc);
    for (k, &e) in c.j.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let base = UExpElem::elementary(n, ctx.trunc, k + 1);
        for _ in 0..e {
            acc = acc.mul(&base);
        }
    }
    acc.to_smash(ctx)
}

/// Exact image of Ph^K: product over k of (ch_k c(ch_k))^(K_k). The result
/// is a d1-cycle by construction.
pub fn pontryagin_to_smash(p: &PontryaginMonomial, ctx: &SmashCtx) -> SmashElement {
    let n = p.k.len();
    let mut acc = UExpElem::one(n, ctx.trunc);
    for (k, &e) in p.k.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let ck = UExpElem::elementary(n, ctx.trunc, k + 1);
        let conj = ck.conj(ctx);
        let pk = ck.mul(&conj);
        for _ in 0..e {
            acc = acc.mul(&pk);
        }
    }
    acc.to_smash(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    fn key(i: &[u32], e: &[u8]) -> MonomialKey {
        MonomialKey::new(i.to_vec(), e.iter().map(|&x| x != 0).collect())
    }

    fn ctx2() -> &'static SmashCtx {
        static CTX: OnceLock<SmashCtx> = OnceLock::new();
        CTX.get_or_init(|| SmashCtx::new(2, 10).unwrap())
    }

    fn ctx3() -> &'static SmashCtx {
        static CTX: OnceLock<SmashCtx> = OnceLock::new();
        CTX.get_or_init(|| SmashCtx::new(3, 10).unwrap())
    }

    #[test]
    fn expand_w_examples() {
        let w = expand_w(&SymKey::new(key(&[1, 0], &[0, 1])).unwrap(), ctx2());
        assert_eq!(w.num_terms(), 2);
        assert_eq!(w.coeff_of(&key(&[1, 0], &[0, 1])), CoeffElement::one());
        assert_eq!(w.coeff_of(&key(&[0, 1], &[1, 0])), CoeffElement::one());

        let w = expand_w(&SymKey::new(key(&[1, 1, 0], &[0, 0, 1])).unwrap(), ctx3());
        assert_eq!(w.num_terms(), 3);
        assert_eq!(w.coeff_of(&key(&[1, 0, 1], &[0, 1, 0])), CoeffElement::one());

        let w = expand_w(&SymKey::new(key(&[2, 1], &[0, 0])).unwrap(), ctx2());
        assert_eq!(w.num_terms(), 2);
        assert_eq!(w.coeff_of(&key(&[1, 2], &[0, 0])), CoeffElement::one());
    }

    #[test]
    fn property_a_is_enforced() {
        assert!(SymKey::new(key(&[0, 1], &[1, 0])).is_err());
        assert!(SymKey::new(key(&[1, 0], &[0, 0])).is_err()); // empty slot
        assert!(SymKey::new(key(&[1, 1], &[1, 0])).is_ok());
    }

    #[test]
    fn expand_w_lead_is_key() {
        for (i, e) in [(vec![2, 1, 1], vec![1, 1, 0]), (vec![1, 1, 0], vec![1, 0, 1])] {
            let k = key(&i, &e.iter().map(|&x| x as u8).collect::<Vec<_>>());
            if !k.property_a() {
                continue;
            }
            let w = expand_w(&SymKey::new(k.clone()).unwrap(), ctx3());
            let (lead, c) = w.lead_term().unwrap();
            assert_eq!(lead, k);
            assert_eq!(c, CoeffElement::one());
        }
    }

    #[test]
    fn chern_small_cases() {
        // ch_2 at n = 2 is uh1 uh2
        let z = chern_to_smash(&ChernMonomial::new(vec![0, 1]), ctx2());
        assert_eq!(z.num_terms(), 1);
        assert_eq!(z.coeff_of(&key(&[0, 0], &[1, 1])), CoeffElement::one());
        // ch_1 at n = 2 is uh1 + uh2
        let z = chern_to_smash(&ChernMonomial::new(vec![1, 0]), ctx2());
        assert_eq!(z.coeff_of(&key(&[0, 0], &[1, 0])), CoeffElement::one());
        assert_eq!(z.coeff_of(&key(&[0, 0], &[0, 1])), CoeffElement::one());
        assert_eq!(z.num_terms(), 2);
    }

    #[test]
    fn chern_lead_terms_with_sign() {
        // lead of ch_k ch_n is (-1)^k ph_1..ph_k uh_(k+1)..uh_n
        for (n, k) in [(2usize, 1usize), (3, 1), (3, 2)] {
            let ctx = if n == 2 { ctx2() } else { ctx3() };
            let mut j = vec![0u32; n];
            j[k - 1] += 1;
            j[n - 1] += 1;
            let z = chern_to_smash(&ChernMonomial::new(j), ctx);
            let (lead, c) = z.lead_term().unwrap();
            let mut i = vec![0u32; n];
            let mut e = vec![0u8; n];
            for t in 0..k {
                i[t] = 1;
            }
            for t in k..n {
                e[t] = 1;
            }
            assert_eq!(lead, key(&i, &e), "lead mismatch at n={n}, k={k}");
            let want = if k % 2 == 1 {
                CoeffElement::from_int(-1)
            } else {
                CoeffElement::one()
            };
            assert_eq!(c, want, "sign mismatch at n={n}, k={k}");
        }
    }

    #[test]
    fn w_to_chern_examples() {
        let j = w_to_chern(&SymKey::new(key(&[1, 1], &[0, 0])).unwrap());
        assert_eq!(j, ChernMonomial::new(vec![0, 2]));
        let j = w_to_chern(&SymKey::new(key(&[1, 0], &[0, 1])).unwrap());
        assert_eq!(j, ChernMonomial::new(vec![1, 1]));
    }

    #[test]
    fn chern_weights_key_inverts_w_to_chern() {
        for i in 0..3u32 {
            for j in 0..=i {
                for (e1, e2) in [(0u8, 0u8), (1, 0), (1, 1), (0, 1)] {
                    let k = key(&[i, j], &[e1, e2]);
                    if !k.property_a() {
                        continue;
                    }
                    let sym = SymKey::new(k.clone()).unwrap();
                    let back = w_to_chern(&sym).weights_key();
                    assert_eq!(back, k);
                }
            }
        }
    }

    #[test]
    fn pontryagin_chern_recipe_roundtrip() {
        // lead keys from the (K, r) recipe match multiplying out the images
        for k1 in 0..2u32 {
            for k2 in 0..2u32 {
                for r1 in 0..2u8 {
                    for r2 in 0..2u8 {
                        if k2 + r2 as u32 == 0 {
                            continue; // outside MU(2)
                        }
                        let p = PontryaginMonomial::new(vec![k1, k2]);
                        let k = pontryagin_chern_key(&p, &[r1, r2]);
                        assert!(k.property_a());
                        // total Chern exponents: j_m = 2 k_m + r_m
                        let j = ChernMonomial::new(vec![
                            2 * k1 + r1 as u32,
                            2 * k2 + r2 as u32,
                        ]);
                        assert_eq!(j.weights_key(), k);
                    }
                }
            }
        }
    }

    #[test]
    fn parity_examples_and_exhaustive() {
        assert_eq!(ChernMonomial::new(vec![1, 1]).parity(), 1);
        assert_eq!(ChernMonomial::new(vec![0, 3]).parity(), 0);
        // parity of sum of odd-position exponents equals s(eps) parity of the key
        for n in 1..=4usize {
            for j in all_exponent_vectors(n, 3) {
                let c = ChernMonomial::new(j);
                let k = c.weights_key();
                assert_eq!(c.parity(), k.voe(), "parity mismatch at {c}");
            }
        }
    }

    fn all_exponent_vectors(n: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for v in &out {
                for e in 0..=max {
                    let mut w = v.clone();
                    w.push(e);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn pontryagin_images() {
        // Ph_1 at n = 1 is exactly ph_1
        let ctx1: SmashCtx = SmashCtx::new(1, 10).unwrap();
        let z = pontryagin_to_smash(&PontryaginMonomial::new(vec![1]), &ctx1);
        assert_eq!(z.num_terms(), 1);
        assert_eq!(z.coeff_of(&key(&[1], &[0])), CoeffElement::one());
        // Ph_2 at n = 2 has lead ph_1 ph_2
        let z = pontryagin_to_smash(&PontryaginMonomial::new(vec![0, 1]), ctx2());
        let (lead, c) = z.lead_term().unwrap();
        assert_eq!(lead, key(&[1, 1], &[0, 0]));
        assert_eq!(c, CoeffElement::one());
    }

    #[test]
    fn pontryagin_images_are_d1_cycles() {
        for p in [
            PontryaginMonomial::new(vec![1, 0]),
            PontryaginMonomial::new(vec![0, 1]),
            PontryaginMonomial::new(vec![1, 1]),
        ] {
            let z = pontryagin_to_smash(&p, ctx2());
            let d = z.d1(ctx2());
            assert!(d.is_zero(), "d1 of a Pontryagin image is {}", d.render());
        }
    }

    #[test]
    fn expand_w_term_count_is_multinomial() {
        // pairs (2,0),(1,0),(1,0) -> 3 distinct arrangements
        let w = expand_w(&SymKey::new(key(&[2, 1, 1], &[0, 0, 0])).unwrap(), ctx3());
        assert_eq!(w.num_terms(), 3);
        // all terms coefficient one and permutation-symmetric support
        for (_, c) in w.terms() {
            assert_eq!(c, &CoeffElement::one());
        }
    }
}
