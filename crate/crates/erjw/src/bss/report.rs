//! Page reports and torsion logs: the externally visible shape of a run.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::coeff::DEGREE_PERIOD;
use crate::smash::MonomialKey;

pub const SCHEMA: &str = "erjw/1";

/// Which coefficient block sits on a generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum BlockTag {
    /// Z_(2)[v1h], the integral block of the E1 page.
    Z2Loc,
    /// Z/2[v1h], a v1h-free mod-2 block.
    Z2V1Free,
    /// Z/2 with v1h acting as zero on the graded piece.
    Z2,
}

impl BlockTag {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockTag::Z2Loc => "Z(2)[v1h]",
            BlockTag::Z2V1Free => "Z/2[v1h]",
            BlockTag::Z2 => "Z/2",
        }
    }
}

impl Serialize for BlockTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One generator of a page: a basis key together with an explicit v2 power.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenEntry {
    pub key: MonomialKey,
    pub v2: u8,
    pub block: BlockTag,
}

impl GenEntry {
    /// Degree mod 48 at v1h-exponent zero.
    pub fn degree(&self) -> i32 {
        (self.key.degree() - 6 * self.v2 as i32).rem_euclid(DEGREE_PERIOD)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "key": self.key.to_json(),
            "v2": self.v2,
            "block": self.block.as_str(),
        })
    }
}

/// One x^r-torsion generator family on a key: the v2 powers run over
/// voe + {0,2,4,6} for order 1 and {0,4} for order 3, a single power for
/// order 7. `v1_shift` records the v1h multiple the representative carries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorsionEntry {
    pub order: u8,
    /// Stage of the auxiliary spectral sequence that detected it (order 1),
    /// 0 for the d3/d7 entries.
    pub stage: usize,
    pub key: MonomialKey,
    pub source: Option<MonomialKey>,
    pub v1_shift: u8,
    pub block: BlockTag,
    /// Parity tag: 1 means the v2^{o/e} factor is v2.
    pub voe: u8,
}

impl TorsionEntry {
    pub fn v2_powers(&self) -> Vec<u8> {
        match self.order {
            1 => (0..4).map(|m| (self.voe + 2 * m) % 8).collect(),
            3 => vec![0, 4],
            _ => vec![0],
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "key": self.key.to_json(),
            "stage": self.stage,
            "source": self.source.as_ref().map(|k| k.to_json()),
            "v1_shift": self.v1_shift,
            "block": self.block.as_str(),
            "voe": self.voe,
            "v2": self.v2_powers(),
        })
    }
}

/// A spectral-sequence page with per-degree generators and the torsion
/// generators known so far.
#[derive(Clone, Debug)]
pub struct PageReport {
    pub space: String,
    pub n: usize,
    pub page: u8,
    pub max_len: u32,
    pub margin: u32,
    pub gens: Vec<GenEntry>,
    pub torsion: BTreeMap<u8, Vec<TorsionEntry>>,
}

impl PageReport {
    /// Generators grouped by degree mod 48, ascending.
    pub fn by_degree(&self) -> BTreeMap<i32, Vec<&GenEntry>> {
        let mut out: BTreeMap<i32, Vec<&GenEntry>> = BTreeMap::new();
        for g in &self.gens {
            out.entry(g.degree()).or_default().push(g);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let degrees: Vec<serde_json::Value> = self
            .by_degree()
            .into_iter()
            .map(|(deg, gens)| {
                serde_json::json!({
                    "deg": deg,
                    "gens": gens.iter().map(|g| g.to_json()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let torsion: serde_json::Map<String, serde_json::Value> = self
            .torsion
            .iter()
            .map(|(order, list)| {
                (
                    order.to_string(),
                    serde_json::Value::Array(list.iter().map(|t| t.to_json()).collect()),
                )
            })
            .collect();
        serde_json::json!({
            "schema": SCHEMA,
            "space": self.space,
            "n": self.n,
            "page": self.page,
            "max_len": self.max_len,
            "margin": self.margin,
            "degrees": degrees,
            "torsion": torsion,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "space={} n={} page={} max_len={} margin={}\n",
            self.space, self.n, self.page, self.max_len, self.margin
        ));
        for (deg, gens) in self.by_degree() {
            out.push_str(&format!("  deg {deg}:\n"));
            for g in gens {
                out.push_str(&format!("    {} v2^{} [{}]\n", g.key, g.v2, g.block.as_str()));
            }
        }
        for (order, list) in &self.torsion {
            out.push_str(&format!("  x^{order}-torsion generators:\n"));
            for t in list {
                let shift = match t.v1_shift {
                    0 => String::new(),
                    1 => "v1h ".into(),
                    s => format!("v1h^{s} "),
                };
                let voe = if t.voe == 1 { "v2^{o/e} " } else { "" };
                out.push_str(&format!(
                    "    [{}] {voe}{shift}{} (stage {})\n",
                    t.block.as_str(),
                    t.key,
                    t.stage
                ));
            }
        }
        out
    }
}
