//! Named scheme presets, serializable as JSON.

use serde::{Deserialize, Serialize};

use crate::polarwom::{build_frozen_set, PolarCode, PolarConcentratedWom, PolarParams};
use crate::rmcodes::{Construction1, Construction2, IndexedScheme, MainPosition, RewriteCode, RmError, Uncoded};
use crate::scalar::Fraction;
use crate::womlib::{
    ConcatWom, ConstantWeightAdapter, Example3Wom, HashWom, ScriptedConcentratedWom, SingleBlock,
    StrongAsWeak,
};

/// WOM ingredient. Weights are always `(r+1)/q` and `1/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ingredient {
    /// The 5-message table code on 6 cells.
    Example3,
    /// Scripted concentrated code behind the flip adapter.
    Scripted {
        n: usize,
        k_c: u64,
        delta: Fraction,
        offsets: Vec<i64>,
    },
    Hash {
        n: usize,
        t1: usize,
        t2: usize,
        k: usize,
        l: usize,
    },
    /// Polar concentrated code behind the flip adapter. The rate is
    /// `rate_fraction * C_W`.
    Polar {
        n: usize,
        delta: Fraction,
        rate_fraction: f64,
        trials: usize,
        seed: u64,
        address: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "kebab-case")]
pub enum Preset {
    Con1,
    Con2 { q: usize, r: usize, ingredient: Ingredient },
    Con3 { q: usize, r: usize, ingredient: Ingredient },
    Con6 { q: usize, r: usize, ingredient: Ingredient },
    Uncoded { q: usize, z: usize },
}

pub const PRESET_NAMES: [&str; 6] = [
    "con1",
    "con2-example3",
    "con3-scripted",
    "con3-polar",
    "con6-hash",
    "uncoded-3-2",
];

impl Preset {
    pub fn named(name: &str) -> Option<Self> {
        Some(match name {
            "con1" => Preset::Con1,
            "con2-example3" => Preset::Con2 { q: 3, r: 1, ingredient: Ingredient::Example3 },
            "con3-scripted" => Preset::Con3 {
                q: 4,
                r: 1,
                ingredient: Ingredient::Scripted {
                    n: 24,
                    k_c: 8,
                    delta: Fraction::new(1, 8),
                    offsets: (-3..=3).collect(),
                },
            },
            "con3-polar" => Preset::Con3 {
                q: 4,
                r: 1,
                ingredient: Ingredient::Polar {
                    n: 256,
                    delta: Fraction::new(1, 16),
                    rate_fraction: 0.5,
                    trials: 4000,
                    seed: 1,
                    address: 0,
                },
            },
            "con6-hash" => Preset::Con6 {
                q: 3,
                r: 1,
                ingredient: Ingredient::Hash { n: 6, t1: 1, t2: 2, k: 1, l: 0 },
            },
            "uncoded-3-2" => Preset::Uncoded { q: 3, z: 2 },
            _ => return None,
        })
    }

    /// Assembles the scheme. Polar ingredients estimate their frozen set
    /// here.
    pub fn build(&self) -> Result<Box<dyn RewriteCode>, RmError> {
        Ok(match self {
            Preset::Con1 => Box::new(Construction1),
            Preset::Con2 { q, r, ingredient } => match ingredient {
                Ingredient::Example3 => Box::new(Construction2::new(Example3Wom, *q, *r)?),
                _ => return Err(RmError::ParamError("con2 needs a strong WOM code".into())),
            },
            Preset::Con3 { q, r, ingredient } => {
                let wom = concat(ingredient, *q, *r)?;
                if wom.params().t != 1 {
                    return Err(RmError::ParamError("con3 takes a single WOM block".into()));
                }
                Box::new(IndexedScheme::new(wom, *q, *r, MainPosition::First)?)
            }
            Preset::Con6 { q, r, ingredient } => {
                Box::new(IndexedScheme::new(concat(ingredient, *q, *r)?, *q, *r, MainPosition::Last)?)
            }
            Preset::Uncoded { q, z } => Box::new(Uncoded::new(*q, *z)?),
        })
    }
}

fn concat(ingredient: &Ingredient, q: usize, r: usize) -> Result<Box<dyn ConcatWom>, RmError> {
    if r + 1 >= q {
        return Err(RmError::ParamError(format!("need r <= q - 2, got q={q}, r={r}")));
    }
    let w_s = Fraction::new(r as u64 + 1, q as u64);
    let w_x = Fraction::new(1, q as u64);
    let param = |e: String| RmError::ParamError(e);
    Ok(match ingredient {
        Ingredient::Example3 => Box::new(SingleBlock(StrongAsWeak(Example3Wom))),
        Ingredient::Scripted { n, k_c, delta, offsets } => {
            let inner = ScriptedConcentratedWom::new(*n, *k_c, w_s, w_x, *delta, offsets.clone())
                .map_err(|e| param(e.to_string()))?;
            Box::new(SingleBlock(ConstantWeightAdapter::new(inner)))
        }
        Ingredient::Hash { n, t1, t2, k, l } => {
            Box::new(HashWom::new(*n, *t1, *t2, *k, *l, w_s, w_x).map_err(|e| param(e.to_string()))?)
        }
        Ingredient::Polar { n, delta, rate_fraction, trials, seed, address } => {
            let mut params = PolarParams::new(*n, w_s, w_x, 0.0, *delta).map_err(|e| param(e.to_string()))?;
            params.eps_c = (1.0 - rate_fraction) * params.c_w();
            let frozen = build_frozen_set(&params, *trials, *seed).map_err(|e| param(e.to_string()))?;
            let code = PolarCode::new(params, frozen).map_err(|e| param(e.to_string()))?;
            Box::new(SingleBlock(ConstantWeightAdapter::new(PolarConcentratedWom::new(
                code, *address, *seed,
            ))))
        }
    })
}
