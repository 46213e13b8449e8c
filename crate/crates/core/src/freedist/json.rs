//! JSON documents for `BDist` and `JointBDist`.
//!
//! ```json
//! {"d": 2, "N": 3, "norm_bound": 1.5,
//!  "moments": {"1": [[re, im], ...], "2": [...], "3": [...]}}
//! ```
//!
//! Each moment array is row-major by `(output, insertion₁, …)`. Joint
//! documents key moments by word (`"1"`, `"12"`, `"212"`, …) and carry the
//! pair of marginal norm bounds.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dist::{BDist, JointBDist, Word};
use crate::error::{Error, Result};
use crate::nccomb::tensor::MultilinearTensor;

#[derive(Serialize, Deserialize)]
struct DistDoc<NB> {
    d: usize,
    #[serde(rename = "N")]
    order: usize,
    norm_bound: NB,
    moments: BTreeMap<String, Vec<[f64; 2]>>,
}

fn encode(t: &MultilinearTensor) -> Vec<[f64; 2]> {
    t.data().iter().map(|z| [z.re, z.im]).collect()
}

fn decode(d: usize, order: usize, v: &[[f64; 2]]) -> Result<MultilinearTensor> {
    MultilinearTensor::new(d, order, v.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

/// Sort keys by length first so `"10"` never precedes `"2"` when reading.
fn by_order(keys: &BTreeMap<String, Vec<[f64; 2]>>) -> Vec<(&String, &Vec<[f64; 2]>)> {
    let mut v: Vec<_> = keys.iter().collect();
    v.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
    v
}

impl BDist {
    pub fn to_json(&self) -> String {
        let doc = DistDoc {
            d: self.d(),
            order: self.order(),
            norm_bound: self.norm_bound(),
            moments: self.moments().iter().map(|t| (t.order().to_string(), encode(t))).collect(),
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<BDist> {
        let doc: DistDoc<f64> = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if doc.moments.len() != doc.order {
            return Err(Error::Format(format!("expected {} moment entries", doc.order)));
        }
        let mut moments = Vec::with_capacity(doc.order);
        for n in 1..=doc.order {
            let v = doc.moments.get(&n.to_string()).ok_or_else(|| Error::Format(format!("missing moment {n}")))?;
            moments.push(decode(doc.d, n, v)?);
        }
        BDist::new(doc.d, moments, doc.norm_bound)
    }
}

impl JointBDist {
    pub fn to_json(&self) -> String {
        let doc = DistDoc {
            d: self.d(),
            order: self.order(),
            norm_bound: self.norm_bounds(),
            moments: self.words().map(|(w, t)| (w.to_string(), encode(t))).collect(),
        };
        serde_json::to_string(&doc).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<JointBDist> {
        let doc: DistDoc<[f64; 2]> = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        let mut moments = BTreeMap::new();
        for (key, v) in by_order(&doc.moments) {
            let w: Word = key.parse()?;
            moments.insert(w.clone(), decode(doc.d, w.len(), v)?);
        }
        JointBDist::new(doc.d, doc.order, doc.norm_bound, moments)
    }
}
