//! Hidden ground truth for each problem.
//!
//! Indices are zero-based throughout: items are `0..K`, and a SEARCH slot
//! `s` in `0..=K` means the target sits above items `0..s` and below the
//! rest.

use serde::{Deserialize, Serialize};

use crate::channel::NoiseModel;
use crate::error::{Error, Result};

/// `K >= 1` hidden bits for OR.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitInstance {
    bits: Vec<bool>,
}

impl BitInstance {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyInstance);
        }
        Ok(Self { bits })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        Self::new(vec![false; k])
    }

    /// All zeros except a single one at `index`.
    pub fn single_one(k: usize, index: usize) -> Result<Self> {
        if index >= k {
            return Err(Error::IndexOutOfRange { index, len: k });
        }
        let mut bits = vec![false; k];
        bits[index] = true;
        Self::new(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn or(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }
}

/// A total order over `K` distinct items: `ranks[i]` is the rank of item
/// `i`, `0` being the smallest. Only relative order matters to a
/// comparison, so no values are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankInstance {
    ranks: Vec<usize>,
}

impl RankInstance {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let mut seen = vec![false; ranks.len()];
        for &r in &ranks {
            if r >= ranks.len() || seen[r] {
                return Err(Error::InvalidInstance(format!(
                    "ranks {ranks:?} are not a permutation of 0..{}",
                    ranks.len()
                )));
            }
            seen[r] = true;
        }
        Ok(Self { ranks })
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::new((0..k).collect())
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, item: usize) -> usize {
        self.ranks[item]
    }

    /// Index of the largest item.
    pub fn argmax(&self) -> usize {
        self.ranks
            .iter()
            .position(|&r| r + 1 == self.ranks.len())
            .expect("permutation contains its top rank")
    }

    /// Items from smallest to largest.
    pub fn sorted_order(&self) -> Vec<usize> {
        let mut order = vec![0; self.ranks.len()];
        for (item, &r) in self.ranks.iter().enumerate() {
            order[r] = item;
        }
        order
    }
}

/// Position of a new element among `K` sorted items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchInstance {
    len: usize,
    slot: usize,
}

impl SearchInstance {
    pub fn new(len: usize, slot: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyInstance);
        }
        if slot > len {
            return Err(Error::InvalidInstance(format!(
                "slot {slot} outside 0..={len}"
            )));
        }
        Ok(Self { len, slot })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn slot(&self) -> usize {
        self.slot
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Bits(BitInstance),
    Ranks(RankInstance),
    Search(SearchInstance),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Bits(_) => InstanceKind::Bits,
            Instance::Ranks(_) => InstanceKind::Ranks,
            Instance::Search(_) => InstanceKind::Search,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Instance::Bits(b) => b.len(),
            Instance::Ranks(r) => r.len(),
            Instance::Search(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl From<BitInstance> for Instance {
    fn from(v: BitInstance) -> Self {
        Instance::Bits(v)
    }
}

impl From<RankInstance> for Instance {
    fn from(v: RankInstance) -> Self {
        Instance::Ranks(v)
    }
}

impl From<SearchInstance> for Instance {
    fn from(v: SearchInstance) -> Self {
        Instance::Search(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    Bits,
    Ranks,
    Search,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Bits => "bits",
            InstanceKind::Ranks => "ranks",
            InstanceKind::Search => "search",
        }
    }
}

/// On-disk form of an instance together with the channel and seed of the
/// session it is meant for:
///
/// ```json
/// {"kind": "bits", "data": [0, 1, 0], "p": 0.1, "seed": 7}
/// ```
///
/// `data` holds the bits for `bits`, the rank of each item for `ranks`,
/// and `[K, slot]` for `search`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub kind: InstanceKind,
    pub data: Vec<u64>,
    pub p: NoiseModel,
    pub seed: u64,
}

impl InstanceDoc {
    pub fn new(instance: &Instance, noise: NoiseModel, seed: u64) -> Self {
        let data = match instance {
            Instance::Bits(b) => b.bits().iter().map(|&x| x as u64).collect(),
            Instance::Ranks(r) => r.ranks().iter().map(|&x| x as u64).collect(),
            Instance::Search(s) => vec![s.len() as u64, s.slot() as u64],
        };
        Self {
            kind: instance.kind(),
            data,
            p: noise,
            seed,
        }
    }

    pub fn instance(&self) -> Result<Instance> {
        match self.kind {
            InstanceKind::Bits => {
                let bits = self
                    .data
                    .iter()
                    .map(|&x| match x {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(Error::InvalidInstance(format!("bit value {other}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(BitInstance::new(bits)?.into())
            }
            InstanceKind::Ranks => {
                let ranks = self.data.iter().map(|&x| x as usize).collect();
                Ok(RankInstance::new(ranks)?.into())
            }
            InstanceKind::Search => match self.data[..] {
                [len, slot] => Ok(SearchInstance::new(len as usize, slot as usize)?.into()),
                _ => Err(Error::InvalidInstance(
                    "search data must be [K, slot]".to_owned(),
                )),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_permutations() {
        assert!(RankInstance::new(vec![0, 0]).is_err());
        assert!(RankInstance::new(vec![1, 2]).is_err());
        assert!(RankInstance::new(vec![]).is_err());
        assert!(RankInstance::new(vec![2, 0, 1]).is_ok());
    }

    #[test]
    fn rank_truths() {
        let r = RankInstance::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(r.argmax(), 2);
        assert_eq!(r.sorted_order(), vec![1, 3, 0, 2]);
    }

    #[test]
    fn search_bounds() {
        assert!(SearchInstance::new(4, 4).is_ok());
        assert!(SearchInstance::new(4, 5).is_err());
        assert!(SearchInstance::new(0, 0).is_err());
    }

    #[test]
    fn single_one() {
        let b = BitInstance::single_one(3, 1).unwrap();
        assert_eq!(b.bits(), &[false, true, false]);
        assert!(b.or());
        assert!(!BitInstance::zeros(3).unwrap().or());
        assert!(BitInstance::single_one(3, 3).is_err());
    }

    #[test]
    fn json_document() {
        let doc =
            InstanceDoc::from_json(r#"{"kind":"bits","data":[0,1],"p":0.1,"seed":9}"#).unwrap();
        assert_eq!(
            doc.instance().unwrap(),
            Instance::Bits(BitInstance::new(vec![false, true]).unwrap())
        );
        let back = InstanceDoc::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);

        let search =
            InstanceDoc::from_json(r#"{"kind":"search","data":[8,3],"p":0,"seed":0}"#).unwrap();
        assert_eq!(
            search.instance().unwrap(),
            Instance::Search(SearchInstance::new(8, 3).unwrap())
        );
    }

    #[test]
    fn json_rejects_invalid() {
        for bad in [
            r#"{"kind":"bits","data":[0,2],"p":0.1,"seed":0}"#,
            r#"{"kind":"ranks","data":[0,0],"p":0.1,"seed":0}"#,
            r#"{"kind":"search","data":[3],"p":0.1,"seed":0}"#,
        ] {
            assert!(
                InstanceDoc::from_json(bad).unwrap().instance().is_err(),
                "{bad}"
            );
        }
        assert!(InstanceDoc::from_json(r#"{"kind":"bits","data":[0],"p":0.5,"seed":0}"#).is_err());
        assert!(InstanceDoc::from_json(r#"{"kind":"tree","data":[0],"p":0.1,"seed":0}"#).is_err());
    }
}
