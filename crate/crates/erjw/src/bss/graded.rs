//! The auxiliary filtration spectral sequence computing d1 stage by stage,
//! followed by the coefficient-rule differentials d3 and d7.
//!
//! Stage 0 strips the factor of 2 out of every block and logs the first
//! x^1-torsion families. After that the page is a sum of F2[v1h]-blocks, one
//! per basis key, and each stage j >= 1 cancels the keys whose first uh sits
//! in factor j against their images. The image of a source is put into
//! normal form by exact Gaussian elimination: terms at cancelled keys are
//! replaced by the rest of the differential of the pair that cancelled them
//! (this is where the relation v1h ph = ph^2 enters, with exact
//! coefficients), and the first surviving unit pivot is the graded image.
//! d3 and d7 then run on the symbolic page basis using the same machinery.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::bss::report::{BlockTag, GenEntry, PageReport, TorsionEntry};
use crate::coeff::DEGREE_PERIOD;
use crate::error::{Error, Result};
use crate::par;
use crate::smash::{KeyOrd, MonomialKey, SmashCtx, SmashElement};
use crate::unitary::{expand_w, SymKey};

/// Which module the run computes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Space {
    /// smash^n CP^infinity on the monomial basis ph^I uh^eps.
    Smash,
    /// MU(n) on the symmetric basis w_{I,eps} with property A.
    Mu,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::Smash => "smash",
            Space::Mu => "mu",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "smash" => Ok(Space::Smash),
            "mu" => Ok(Space::Mu),
            other => Err(Error::Usage(format!("unknown space {other:?}"))),
        }
    }

    pub fn admits(self, key: &MonomialKey) -> bool {
        match self {
            Space::Smash => key.smash_condition(),
            Space::Mu => key.property_a(),
        }
    }
}

/// All basis keys for the space with length bounded by `max_len`, in
/// filtration order.
pub fn space_keys(space: Space, n: usize, max_len: u32) -> Vec<MonomialKey> {
    let mut out = Vec::new();
    let mut i = vec![0u32; n];
    let mut eps = vec![false; n];
    fn rec(
        space: Space,
        n: usize,
        max_len: u32,
        k: usize,
        used: u32,
        prev_weight: u32,
        i: &mut Vec<u32>,
        eps: &mut Vec<bool>,
        out: &mut Vec<MonomialKey>,
    ) {
        if k == n {
            out.push(MonomialKey::new(i.clone(), eps.clone()));
            return;
        }
        // remaining factors each need weight >= 1
        let reserve = (n - k - 1) as u32;
        let budget = (max_len - used).saturating_sub(reserve);
        let cap = match space {
            Space::Smash => budget,
            Space::Mu => budget.min(prev_weight),
        };
        for w in 1..=cap {
            i[k] = w / 2;
            eps[k] = w % 2 == 1;
            rec(space, n, max_len, k + 1, used + w, w, i, eps, out);
        }
    }
    rec(space, n, max_len, 0, 0, u32::MAX, &mut i, &mut eps, &mut out);
    out.sort_by(|a, b| crate::smash::order_compare(a, b));
    out
}

/// Polynomial over F2 in v1h, truncated at degree 64; bit a is the
/// coefficient of v1h^a. Far more headroom than any window needs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct F2Poly(pub u64);

impl F2Poly {
    pub const ZERO: F2Poly = F2Poly(0);
    pub const ONE: F2Poly = F2Poly(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn min_level(self) -> Option<u32> {
        (!self.is_zero()).then(|| self.0.trailing_zeros())
    }

    pub fn xor(self, rhs: F2Poly) -> F2Poly {
        F2Poly(self.0 ^ rhs.0)
    }

    pub fn shift_down(self, k: u32) -> F2Poly {
        F2Poly(self.0 >> k)
    }

    pub fn mul(self, rhs: F2Poly) -> F2Poly {
        let mut acc = 0u64;
        let mut a = self.0;
        let mut shift = 0;
        while a != 0 {
            let tz = a.trailing_zeros();
            a >>= tz;
            shift += tz;
            acc ^= rhs.0 << shift;
            a &= !1;
        }
        F2Poly(acc)
    }

    /// Inverse of a unit (constant term 1), modulo v1h^64.
    pub fn inverse(self) -> F2Poly {
        assert!(self.0 & 1 == 1, "inverse of a non-unit");
        let mut out = 1u64;
        for k in 1..64 {
            // coefficient k of self * out must vanish
            let mut c = 0u64;
            for m in 1..=k {
                if (self.0 >> m) & 1 == 1 {
                    c ^= (out >> (k - m)) & 1;
                }
            }
            out |= (c & 1) << k;
        }
        F2Poly(out)
    }
}

/// Block state of a key on the current page.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Tag {
    /// Z/2[v1h] block (Z_(2)[v1h] before stage 0).
    Free,
    /// Only the v1h^0 line survives.
    Capped,
}

/// A cancellation record: d(sigma) = v1h^level * unit * target + rest.
#[derive(Clone, Debug)]
pub struct PairRec {
    pub stage: usize,
    pub sigma: MonomialKey,
    pub unit: F2Poly,
    pub level: u32,
}

/// What happened to a key that is no longer fully alive.
#[derive(Clone, Debug)]
pub enum Fate {
    /// Used as a source; its column is gone.
    SourceGone { stage: usize },
    /// Hit at v1h-level 1: the v1h tower cancelled, the F2 line survives.
    TargetCapped(PairRec),
    /// The key is completely gone: killed at level 0, possibly after having
    /// been capped first.
    TargetGone { level0: PairRec, prior_cap: Option<PairRec> },
}

/// The mod-2 reduced d1 of a basis element: property-A coordinates for the
/// symmetric basis, each carrying a uniform v2^-3, reduced to F2[v1h].
type RawD = Arc<Vec<(MonomialKey, F2Poly)>>;

/// The page state of the auxiliary spectral sequence.
#[derive(Clone)]
pub struct GradedState {
    pub space: Space,
    pub n: usize,
    pub max_len: u32,
    pub margin: u32,
    /// Stages already applied: 0 means d_{1,0} has not run yet.
    pub stage: usize,
    pub live: BTreeMap<KeyOrd, Tag>,
    pub fates: BTreeMap<KeyOrd, Fate>,
    /// Sources too close to the window edge to process soundly.
    pub unprocessed: BTreeSet<KeyOrd>,
    pub torsion1: Vec<TorsionEntry>,
    /// Cached mod-2 differentials of every processed source.
    dcache: BTreeMap<KeyOrd, RawD>,
}

fn mod2_raw(space: Space, image: &SmashElement) -> Vec<(MonomialKey, F2Poly)> {
    let mut out = Vec::new();
    for (key, coeff) in image.terms() {
        if space == Space::Mu && !key.property_a() {
            continue; // non-lead monomials of the symmetric generators
        }
        debug_assert_eq!(coeff.v2_uniform(), Some(5), "d1 must carry v2^-3 uniformly");
        let mut mask = 0u64;
        for level in coeff.v1_levels_mod2() {
            if level < 64 {
                mask ^= 1 << level;
            }
        }
        if mask != 0 {
            out.push((key.clone(), F2Poly(mask)));
        }
    }
    out
}

impl GradedState {
    pub fn new(space: Space, n: usize, max_len: u32, margin: u32) -> Self {
        assert!(margin >= 3, "margins below 3 cannot absorb the differentials");
        assert!(max_len >= 2 * n as u32, "window too small for the smash condition");
        let live = space_keys(space, n, max_len)
            .into_iter()
            .map(|k| (KeyOrd(k), Tag::Free))
            .collect();
        GradedState {
            space,
            n,
            max_len,
            margin,
            stage: 0,
            live,
            fates: BTreeMap::new(),
            unprocessed: BTreeSet::new(),
            torsion1: Vec::new(),
            dcache: BTreeMap::new(),
        }
    }

    pub fn trusted_len(&self) -> u32 {
        self.max_len - self.margin
    }

    pub fn tag_of(&self, key: &MonomialKey) -> Option<Tag> {
        self.live.get(&KeyOrd(key.clone())).copied()
    }

    /// The exact d1 of the basis element behind a key.
    fn expand_d1(&self, ctx: &SmashCtx, key: &MonomialKey) -> SmashElement {
        let z = match self.space {
            Space::Smash => SmashElement::monomial(
                self.n,
                self.max_len,
                key.clone(),
                crate::coeff::CoeffElement::one(),
            ),
            Space::Mu => {
                expand_w(&SymKey::new(key.clone()).expect("basis keys have property A"), ctx)
            }
        };
        z.d1(ctx)
    }

    /// The stage-start reduced differential of a key, ready for storage.
    fn reduced_d(&self, ctx: &SmashCtx, key: &MonomialKey) -> BTreeMap<KeyOrd, F2Poly> {
        self.reduce_vector(mod2_raw(self.space, &self.expand_d1(ctx, key)))
    }

    /// Fully reduce a mod-2 vector against the cancellations made so far:
    /// components at cancelled keys are eliminated by adding the stored
    /// reduced differential of the pair that cancelled them, and v1h
    /// multiples at capped keys are pushed the same way. The result is
    /// supported on live keys only, with capped keys carrying only their
    /// surviving v1h^0 line. Termination: a pair's stored vector is
    /// supported on keys alive at its own stage, so corrections only walk
    /// forward through (stage, filtration order) and downward in v1h degree.
    fn reduce_vector(&self, start: Vec<(MonomialKey, F2Poly)>) -> BTreeMap<KeyOrd, F2Poly> {
        let mut pending: BTreeMap<KeyOrd, F2Poly> = BTreeMap::new();
        for (k, p) in start {
            if p.is_zero() {
                continue;
            }
            let e = pending.entry(KeyOrd(k)).or_default();
            *e = e.xor(p);
        }
        pending.retain(|_, v| !v.is_zero());
        loop {
            // the first entry that still needs eliminating
            let work = pending.iter().find_map(|(k, lambda)| {
                let needs = match (self.tag_of(&k.0), self.fates.get(k)) {
                    (Some(Tag::Free), _) => false,
                    (Some(Tag::Capped), _) => lambda.0 & !1 != 0,
                    (None, _) => true,
                };
                needs.then(|| (k.clone(), *lambda))
            });
            let Some((kord, lambda)) = work else {
                pending.retain(|_, v| !v.is_zero());
                return pending;
            };
            // Corrections XOR a multiple of the pair's stored vector into
            // `pending`; the stored vector contains the pivot component at
            // this key, which is what cancels the part being eliminated.
            let mut corrections: Vec<(F2Poly, PairRec)> = Vec::new();
            match (self.tag_of(&kord.0), self.fates.get(&kord)) {
                (Some(Tag::Capped), fate) => {
                    let Some(Fate::TargetCapped(rec)) = fate else {
                        unreachable!("capped keys carry their capping pair");
                    };
                    let high = F2Poly(lambda.0 & !1);
                    corrections.push((high.shift_down(rec.level).mul(rec.unit.inverse()), rec.clone()));
                }
                (None, Some(Fate::SourceGone { .. })) => {
                    // projected away with its column
                    pending.remove(&kord);
                }
                (None, Some(Fate::TargetGone { level0, prior_cap })) => match prior_cap {
                    None => {
                        corrections.push((lambda.mul(level0.unit.inverse()), level0.clone()));
                    }
                    Some(cap) => {
                        let low = F2Poly(lambda.0 & 1);
                        if !low.is_zero() {
                            corrections.push((low.mul(level0.unit.inverse()), level0.clone()));
                        }
                        let high = F2Poly(lambda.0 & !1);
                        if !high.is_zero() {
                            corrections
                                .push((high.shift_down(cap.level).mul(cap.unit.inverse()), cap.clone()));
                        }
                    }
                },
                (None, None) => {
                    // outside the enumerated basis: fell past the window
                    pending.remove(&kord);
                }
                (Some(Tag::Free), _) | (None, Some(Fate::TargetCapped(_))) => {
                    unreachable!("free keys never need work; capped targets stay live")
                }
            }
            for (mult, rec) in corrections {
                if mult.is_zero() {
                    continue;
                }
                let stored = self
                    .dcache
                    .get(&KeyOrd(rec.sigma.clone()))
                    .expect("pair sources have stored reduced differentials");
                for (k, p) in stored.iter() {
                    let add = mult.mul(*p);
                    if add.is_zero() {
                        continue;
                    }
                    let e = pending.entry(KeyOrd(k.clone())).or_default();
                    *e = e.xor(add);
                    if e.is_zero() {
                        pending.remove(&KeyOrd(k.clone()));
                    }
                }
            }
        }
    }

    /// Keys deeper than this may carry stale tags, because the sources that
    /// would have cancelled them were themselves deferred at the window edge.
    fn sound_len(&self) -> u32 {
        self.max_len - 2
    }

    /// The graded image: the minimal usable pivot of the reduced vector.
    /// Deeper v1h multiples of free towers are not unit pivots and are
    /// skipped; they stay inside the stored vector for later corrections.
    /// A pivot in the stale zone means the window cannot decide this source.
    fn pivot_of(&self, reduced: &BTreeMap<KeyOrd, F2Poly>) -> ScanOutcome {
        for (kord, lambda) in reduced {
            let usable = match self.tag_of(&kord.0) {
                Some(Tag::Free) => lambda.min_level().unwrap() <= 1,
                Some(Tag::Capped) => {
                    debug_assert_eq!(lambda.0 & !1, 0);
                    true
                }
                None => unreachable!("reduced vectors are supported on live keys"),
            };
            if usable {
                if kord.0.length() > self.sound_len() {
                    return ScanOutcome::Edge;
                }
                let level = lambda.min_level().unwrap();
                return ScanOutcome::Pivot(kord.0.clone(), level, *lambda);
            }
        }
        ScanOutcome::Zero
    }
}

/// Result of scanning a reduced image for its graded pivot.
pub enum ScanOutcome {
    Pivot(MonomialKey, u32, F2Poly),
    Zero,
    /// The pivot fell into the part of the window where tags may be stale.
    Edge,
}

/// Apply the next differential d_{1,stage} and return the new state.
pub fn gr_d1_step(state: &GradedState, ctx: &SmashCtx) -> Result<GradedState> {
    let mut next = state.clone();
    let j = state.stage;
    if j == 0 {
        for (kord, _) in &state.live {
            next.torsion1.push(TorsionEntry {
                order: 1,
                stage: 0,
                key: kord.0.clone(),
                source: None,
                v1_shift: 0,
                block: BlockTag::Z2Loc,
                voe: kord.0.voe(),
            });
        }
        next.stage = 1;
        return Ok(next);
    }

    let sources: Vec<MonomialKey> = state
        .live
        .keys()
        .map(|k| k.0.clone())
        .filter(|k| k.eps[j - 1])
        .collect();
    debug_assert!(
        sources.iter().all(|k| (0..j - 1).all(|t| !k.eps[t])),
        "earlier stages must have emptied W_1..W_(j-1)"
    );

    let mut deferred = Vec::new();
    let mut workable = Vec::new();
    for s in sources {
        if s.length() + 3 > state.max_len {
            deferred.push(s);
        } else {
            workable.push(s);
        }
    }

    // reduce all sources against the cancellations of earlier stages; the
    // reduced vectors are both the scan input and the stored pair data
    let reduced: Vec<BTreeMap<KeyOrd, F2Poly>> =
        par::map_collect(&workable, |s| state.reduced_d(ctx, s));
    let leads: Vec<ScanOutcome> = reduced.iter().map(|r| state.pivot_of(r)).collect();
    for (s, r) in workable.iter().zip(&reduced) {
        next.dcache.insert(
            KeyOrd(s.clone()),
            Arc::new(r.iter().map(|(k, p)| (k.0.clone(), *p)).collect()),
        );
    }

    let mut hit: BTreeMap<KeyOrd, MonomialKey> = BTreeMap::new();
    for (source, lead) in workable.into_iter().zip(leads) {
        let (target, level, lambda) = match lead {
            ScanOutcome::Pivot(t, l, u) => (t, l, u),
            ScanOutcome::Edge => {
                deferred.push(source);
                continue;
            }
            ScanOutcome::Zero => {
                return Err(Error::StageNotInjective {
                    stage: j,
                    reason: format!("source {source} has zero graded image"),
                });
            }
        };
        if target.eps[j - 1] {
            return Err(Error::StageNotInjective {
                stage: j,
                reason: format!("source {source} pairs with same-stage source {target}"),
            });
        }
        if let Some(prev) = hit.insert(KeyOrd(target.clone()), source.clone()) {
            return Err(Error::StageNotInjective {
                stage: j,
                reason: format!("sources {prev} and {source} share target {target}"),
            });
        }
        let src_tag = state.tag_of(&source).expect("sources are live");
        let tgt_tag = state.tag_of(&target).expect("normal form returns live keys");
        let rec = PairRec {
            stage: j,
            sigma: source.clone(),
            unit: lambda.shift_down(level),
            level,
        };
        let (block, shift) = match (src_tag, tgt_tag, level) {
            // tower against tower, shifted by one
            (Tag::Free, Tag::Free, 1) => {
                next.live.insert(KeyOrd(target.clone()), Tag::Capped);
                next.fates
                    .insert(KeyOrd(target.clone()), Fate::TargetCapped(rec));
                (BlockTag::Z2V1Free, 1)
            }
            // tower against tower at level 0: both vanish
            (Tag::Free, Tag::Free, 0) => {
                next.live.remove(&KeyOrd(target.clone()));
                next.fates.insert(
                    KeyOrd(target.clone()),
                    Fate::TargetGone { level0: rec, prior_cap: None },
                );
                (BlockTag::Z2V1Free, 0)
            }
            // line against line
            (Tag::Capped, Tag::Capped, 0) => {
                let prior = match state.fates.get(&KeyOrd(target.clone())) {
                    Some(Fate::TargetCapped(p)) => Some(p.clone()),
                    _ => None,
                };
                next.live.remove(&KeyOrd(target.clone()));
                next.fates.insert(
                    KeyOrd(target.clone()),
                    Fate::TargetGone { level0: rec, prior_cap: prior },
                );
                (BlockTag::Z2, 0)
            }
            (s, t, l) => {
                return Err(Error::StageNotInjective {
                    stage: j,
                    reason: format!(
                        "source {source} ({s:?}) pairs with {target} ({t:?}) at v1h-level {l}"
                    ),
                });
            }
        };
        next.torsion1.push(TorsionEntry {
            order: 1,
            stage: j,
            key: target.clone(),
            source: Some(source.clone()),
            v1_shift: shift,
            block,
            voe: target.voe(),
        });
        next.live.remove(&KeyOrd(source.clone()));
        next.fates.insert(KeyOrd(source), Fate::SourceGone { stage: j });
    }
    for s in deferred {
        next.unprocessed.insert(KeyOrd(s));
    }
    next.stage = j + 1;
    Ok(next)
}

/// The full graded run through d_{1,n}: the resulting state is the
/// associated graded E2 page with the complete x^1-torsion log.
pub struct GradedRun {
    pub state: GradedState,
}

pub fn run_graded(
    space: Space,
    n: usize,
    max_len: u32,
    margin: u32,
    ctx: &SmashCtx,
) -> Result<GradedRun> {
    let mut state = GradedState::new(space, n, max_len, margin);
    for _ in 0..=n {
        state = gr_d1_step(&state, ctx)?;
    }
    Ok(GradedRun { state })
}

impl GradedRun {
    /// Keys of the E2 page up to a length cutoff, with their block tags.
    /// Unprocessed window-edge sources are excluded.
    pub fn page2_entries(&self, cutoff: u32) -> Vec<(MonomialKey, Tag)> {
        self.state
            .live
            .iter()
            .filter(|(k, _)| k.0.length() <= cutoff && !self.state.unprocessed.contains(k))
            .map(|(k, t)| (k.0.clone(), *t))
            .collect()
    }

    pub fn page2_gens(&self, cutoff: u32) -> Vec<GenEntry> {
        let mut out = Vec::new();
        for (key, tag) in self.page2_entries(cutoff) {
            let voe = key.voe();
            let block = match tag {
                Tag::Free => BlockTag::Z2V1Free,
                Tag::Capped => BlockTag::Z2,
            };
            for m in 0..4u8 {
                out.push(GenEntry { key: key.clone(), v2: (voe + 2 * m) % 8, block });
            }
        }
        out
    }

    pub fn torsion1_trusted(&self, cutoff: u32) -> Vec<&TorsionEntry> {
        self.state
            .torsion1
            .iter()
            .filter(|t| t.key.length() <= cutoff)
            .collect()
    }
}

/// Result of the d3 step: the E4 = E7 page and the x^3-torsion generators.
pub struct D3Run {
    /// Surviving keys: each carries v2^{0,4} over Z/2.
    pub page4: Vec<MonomialKey>,
    pub torsion3: Vec<TorsionEntry>,
    /// Keys whose d3 fate is unknown because the window ends.
    pub unprocessed: Vec<MonomialKey>,
}

/// d3(v2^2 k) = v1h v2^-4 k on the symbolic page basis. On free blocks the
/// v1h-multiple lives and the pairing is block-internal; on capped blocks
/// the class v1h k is eliminated through the same exact corrections the
/// stages used, which lands it on the surviving line of a higher key.
pub fn run_d3(run: &GradedRun) -> Result<D3Run> {
    let state = &run.state;
    let mut torsion3 = Vec::new();
    let mut removed: BTreeSet<KeyOrd> = BTreeSet::new();
    let mut unprocessed = Vec::new();
    let mut hit: BTreeMap<KeyOrd, MonomialKey> = BTreeMap::new();

    let entries: Vec<(MonomialKey, Tag)> = state
        .live
        .iter()
        .filter(|(k, _)| !state.unprocessed.contains(k))
        .map(|(k, t)| (k.0.clone(), *t))
        .collect();
    for (key, _) in &entries {
        if key.s_eps() != 0 {
            return Err(Error::StageNotInjective {
                stage: 0,
                reason: format!("page-2 key {key} still carries uh factors"),
            });
        }
    }

    // the page tags are only exact where every d1 source fit in the window
    let sound = state.max_len.saturating_sub(3);

    for (key, tag) in &entries {
        match tag {
            Tag::Free => {
                torsion3.push(TorsionEntry {
                    order: 3,
                    stage: 0,
                    key: key.clone(),
                    source: Some(key.clone()),
                    v1_shift: 1,
                    block: BlockTag::Z2V1Free,
                    voe: 0,
                });
            }
            Tag::Capped => {
                if key.length() + 2 > sound {
                    unprocessed.push(key.clone());
                    continue;
                }
                let image = vec![(key.clone(), F2Poly(0b10))]; // v1h * key
                let reduced = state.reduce_vector(image);
                let (target, level) = match state.pivot_of(&reduced) {
                    ScanOutcome::Pivot(t, l, _) => (t, l),
                    ScanOutcome::Edge => {
                        unprocessed.push(key.clone());
                        continue;
                    }
                    ScanOutcome::Zero => {
                        return Err(Error::RewriteFailed(format!("d3 image of v2^2 {key}")));
                    }
                };
                if level != 0 || state.tag_of(&target) != Some(Tag::Capped) {
                    return Err(Error::RewriteFailed(format!(
                        "d3 image of {key} lands on {target} at level {level}"
                    )));
                }
                if let Some(prev) = hit.insert(KeyOrd(target.clone()), key.clone()) {
                    return Err(Error::StageNotInjective {
                        stage: 0,
                        reason: format!("d3 sources {prev} and {key} share target {target}"),
                    });
                }
                removed.insert(KeyOrd(target.clone()));
                torsion3.push(TorsionEntry {
                    order: 3,
                    stage: 0,
                    key: target,
                    source: Some(key.clone()),
                    v1_shift: 0,
                    block: BlockTag::Z2,
                    voe: 0,
                });
            }
        }
    }

    let page4 = entries
        .iter()
        .filter(|(k, _)| !removed.contains(&KeyOrd(k.clone())))
        .map(|(k, _)| k.clone())
        .collect();
    Ok(D3Run { page4, torsion3, unprocessed })
}

/// Result of the d7 step: E8 must be empty.
pub struct D7Run {
    pub torsion7: Vec<TorsionEntry>,
}

/// d7(v2^4) = 1 pairs the v2^4 line of every surviving key with its v2^0
/// line, leaving nothing.
pub fn run_d7(d3: &D3Run) -> Result<D7Run> {
    let torsion7 = d3
        .page4
        .iter()
        .map(|key| {
            // x^7 generators land in degrees divisible by 16
            debug_assert_eq!(key.degree().rem_euclid(16), 0);
            TorsionEntry {
                order: 7,
                stage: 0,
                key: key.clone(),
                source: Some(key.clone()),
                v1_shift: 0,
                block: BlockTag::Z2,
                voe: 0,
            }
        })
        .collect();
    Ok(D7Run { torsion7 })
}

/// Everything the pipeline produces for one space and window.
pub struct Pages {
    pub space: Space,
    pub n: usize,
    pub max_len: u32,
    pub margin: u32,
    pub graded: GradedRun,
    pub d3: D3Run,
    pub d7: D7Run,
}

pub fn run_pages(
    space: Space,
    n: usize,
    max_len: u32,
    margin: u32,
    ctx: &SmashCtx,
) -> Result<Pages> {
    let graded = run_graded(space, n, max_len, margin, ctx)?;
    let d3 = run_d3(&graded)?;
    let d7 = run_d7(&d3)?;
    Ok(Pages { space, n, max_len, margin, graded, d3, d7 })
}

impl Pages {
    pub fn trusted_len(&self) -> u32 {
        self.max_len - self.margin
    }

    /// Page-4 generators up to a length cutoff.
    pub fn page4_gens(&self, cutoff: u32) -> Vec<GenEntry> {
        let mut out = Vec::new();
        for key in &self.d3.page4 {
            if key.length() > cutoff {
                continue;
            }
            for v2 in [0u8, 4] {
                out.push(GenEntry { key: key.clone(), v2, block: BlockTag::Z2 });
            }
        }
        out
    }

    pub fn torsion_trusted(&self, order: u8, cutoff: u32) -> Vec<&TorsionEntry> {
        let list: Box<dyn Iterator<Item = &TorsionEntry>> = match order {
            1 => Box::new(self.graded.state.torsion1.iter()),
            3 => Box::new(self.d3.torsion3.iter()),
            7 => Box::new(self.d7.torsion7.iter()),
            _ => Box::new(std::iter::empty()),
        };
        list.filter(|t| t.key.length() <= cutoff).collect()
    }

    /// Assemble the report for a page in {1, 2, 3, 4, 7, 8}.
    pub fn report(&self, page: u8) -> Result<PageReport> {
        let cutoff = self.trusted_len();
        let gens = match page {
            1 => {
                let mut out = Vec::new();
                for key in space_keys(self.space, self.n, cutoff) {
                    for v2 in 0..8u8 {
                        out.push(GenEntry { key: key.clone(), v2, block: BlockTag::Z2Loc });
                    }
                }
                out
            }
            2 | 3 => self.graded.page2_gens(cutoff),
            4 | 7 => self.page4_gens(cutoff),
            8 => Vec::new(),
            other => return Err(Error::Usage(format!("no page {other}; use 1, 2, 3, 4, 7 or 8"))),
        };
        let mut torsion = BTreeMap::new();
        if page >= 2 {
            torsion.insert(1u8, self.torsion_trusted(1, cutoff).into_iter().cloned().collect());
        }
        if page >= 4 {
            torsion.insert(3u8, self.torsion_trusted(3, cutoff).into_iter().cloned().collect());
        }
        if page >= 7 {
            torsion.insert(7u8, self.torsion_trusted(7, cutoff).into_iter().cloned().collect());
        }
        Ok(PageReport {
            space: self.space.as_str().into(),
            n: self.n,
            page,
            max_len: self.max_len,
            margin: self.margin,
            gens,
            torsion,
        })
    }

    /// The d5-vacancy check: no two page-4 generators sit 38 apart mod 48,
    /// so no intermediate differential could pair anything.
    pub fn no_d5_pairing(&self) -> bool {
        let gens = self.page4_gens(self.trusted_len());
        for a in &gens {
            for b in &gens {
                if (b.degree() - a.degree()).rem_euclid(DEGREE_PERIOD) == 38 {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2poly_arithmetic() {
        let a = F2Poly(0b101); // 1 + v^2
        let b = F2Poly(0b11); // 1 + v
        assert_eq!(a.mul(b), F2Poly(0b1111));
        assert_eq!(a.min_level(), Some(0));
        assert_eq!(F2Poly(0b1100).min_level(), Some(2));
        let u = F2Poly(0b1011);
        assert_eq!(u.mul(u.inverse()), F2Poly::ONE);
    }

    #[test]
    fn space_keys_counts() {
        // property-A keys of n = 3 with length <= 12: partitions of s <= 12
        // into exactly three positive parts
        let keys = space_keys(Space::Mu, 3, 12);
        assert_eq!(keys.len(), 53);
        assert!(keys.windows(2).all(|w| crate::smash::order_compare(&w[0], &w[1]) == std::cmp::Ordering::Less));
        // smash keys of n = 2, length <= 4: (w1, w2) with w1 + w2 <= 4
        let keys = space_keys(Space::Smash, 2, 4);
        assert_eq!(keys.len(), 1 + 2 + 3);
    }
}
