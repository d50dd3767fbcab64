//! Multi-indices, the componentwise partial order and the degree reverse
//! lexicographic (grevlex) order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of non-negative derivative orders or exponents.
///
/// The derived `Ord` is plain lexicographic order and only serves as a
/// storage order for maps; the monomial order is [`cmp_grevlex`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, axis: usize) -> Self {
        let mut v = vec![0; n];
        v[axis] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

fn check_len(k: &MultiIndex, l: &MultiIndex) -> Result<()> {
    if k.len() != l.len() {
        return Err(Error::DimensionMismatch { expected: k.len(), found: l.len() });
    }
    Ok(())
}

/// `k ≤ l` componentwise.
pub fn leq_partial(k: &MultiIndex, l: &MultiIndex) -> Result<bool> {
    check_len(k, l)?;
    Ok(k.0.iter().zip(&l.0).all(|(a, b)| a <= b))
}

/// Degree reverse lexicographic comparison: smaller total degree first; on
/// equal degree, the index with the larger entry at the last differing
/// position ranks earlier.
pub fn cmp_grevlex(k: &MultiIndex, l: &MultiIndex) -> Result<Ordering> {
    check_len(k, l)?;
    Ok(grevlex_unchecked(&k.0, &l.0))
}

pub(crate) fn grevlex_unchecked(k: &[u32], l: &[u32]) -> Ordering {
    let sk: u32 = k.iter().sum();
    let sl: u32 = l.iter().sum();
    match sk.cmp(&sl) {
        Ordering::Equal => {}
        other => return other,
    }
    for i in (0..k.len()).rev() {
        if k[i] != l[i] {
            // larger entry ranks earlier
            return l[i].cmp(&k[i]);
        }
    }
    Ordering::Equal
}

/// The box `[lo, hi]` of multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexBox {
    lo: MultiIndex,
    hi: MultiIndex,
}

impl IndexBox {
    pub fn new(lo: MultiIndex, hi: MultiIndex) -> Result<Self> {
        check_len(&lo, &hi)?;
        if !leq_partial(&lo, &hi)? {
            return Err(Error::Parse(format!("box lower corner {lo} is not below {hi}")));
        }
        Ok(IndexBox { lo, hi })
    }

    /// `[0, hi]`.
    pub fn from_origin(hi: MultiIndex) -> Self {
        IndexBox { lo: MultiIndex::zeros(hi.len()), hi }
    }

    /// `[0, ν − 1]` for a multiplicity vector `ν` (all entries ≥ 1).
    pub fn from_multiplicity(nu: &[u32]) -> Self {
        Self::from_origin(MultiIndex(nu.iter().map(|&v| v - 1).collect()))
    }

    pub fn lo(&self) -> &MultiIndex {
        &self.lo
    }

    pub fn hi(&self) -> &MultiIndex {
        &self.hi
    }

    pub fn cardinality(&self) -> usize {
        self.lo.0.iter().zip(&self.hi.0).map(|(a, b)| (b - a + 1) as usize).product()
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        k.len() == self.lo.len()
            && k.0.iter().zip(self.lo.0.iter().zip(&self.hi.0)).all(|(e, (a, b))| a <= e && e <= b)
    }

    /// All elements in ascending grevlex order.
    pub fn enumerate(&self) -> Vec<MultiIndex> {
        let n = self.lo.len();
        let mut out = Vec::with_capacity(self.cardinality());
        let mut cur = self.lo.0.clone();
        loop {
            out.push(MultiIndex(cur.clone()));
            // odometer increment
            let mut i = 0;
            loop {
                if i == n {
                    out.sort_by(|a, b| grevlex_unchecked(&a.0, &b.0));
                    return out;
                }
                if cur[i] < self.hi.0[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lo.0[i];
                i += 1;
            }
        }
    }
}

/// Materialized grevlex enumeration of a box with O(1) position lookup.
#[derive(Clone, Debug)]
pub struct BoxEnumeration {
    elements: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl BoxEnumeration {
    pub fn new(b: &IndexBox) -> Self {
        let elements = b.enumerate();
        let positions = elements.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        BoxEnumeration { elements, positions }
    }

    pub fn elements(&self) -> &[MultiIndex] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.positions.get(k).copied()
    }
}

impl PartialEq for BoxEnumeration {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mi<const N: usize>(v: [u32; N]) -> MultiIndex {
        MultiIndex::from(v)
    }

    #[test]
    fn partial_order_cases() {
        assert!(leq_partial(&mi([0, 1]), &mi([1, 1])).unwrap());
        assert!(!leq_partial(&mi([1, 0]), &mi([0, 1])).unwrap());
        assert!(!leq_partial(&mi([0, 1]), &mi([1, 0])).unwrap());
        assert!(leq_partial(&mi([2, 2]), &mi([2, 2])).unwrap());
        assert!(matches!(leq_partial(&mi([1]), &mi([1, 2])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn grevlex_cases() {
        assert_eq!(cmp_grevlex(&mi([0, 0, 1]), &mi([0, 1, 0])).unwrap(), Ordering::Less);
        assert_eq!(cmp_grevlex(&mi([2, 0]), &mi([0, 1])).unwrap(), Ordering::Greater);
        assert_eq!(cmp_grevlex(&mi([1, 1]), &mi([1, 1])).unwrap(), Ordering::Equal);
        assert!(cmp_grevlex(&mi([1, 1]), &mi([1])).is_err());
    }

    #[test]
    fn unit_first_axis_ranks_n_plus_one() {
        for n in 1..6 {
            let b = IndexBox::from_origin(MultiIndex(vec![2; n]));
            let order = b.enumerate();
            // 1-based position n+1
            assert_eq!(order[n], MultiIndex::unit(n, 0));
            assert_eq!(order[1], MultiIndex::unit(n, n - 1));
        }
    }

    #[test]
    fn enumerate_cases() {
        let b = IndexBox::from_origin(mi([1, 1]));
        assert_eq!(b.enumerate(), vec![mi([0, 0]), mi([0, 1]), mi([1, 0]), mi([1, 1])]);
        let b = IndexBox::from_origin(mi([0]));
        assert_eq!(b.enumerate(), vec![mi([0])]);
        // brute-force: insertion sort of all 6 indices with the comparator
        let mut all = vec![mi([2, 1]), mi([0, 0]), mi([1, 1]), mi([2, 0]), mi([0, 1]), mi([1, 0])];
        for i in 1..all.len() {
            let mut j = i;
            while j > 0 && cmp_grevlex(&all[j - 1], &all[j]).unwrap() == Ordering::Greater {
                all.swap(j - 1, j);
                j -= 1;
            }
        }
        assert_eq!(all, vec![mi([0, 0]), mi([0, 1]), mi([1, 0]), mi([1, 1]), mi([2, 0]), mi([2, 1])]);
        assert_eq!(IndexBox::from_origin(mi([2, 1])).enumerate(), all);
    }

    #[test]
    fn box_with_offset_lower_corner() {
        let b = IndexBox::new(mi([1, 2]), mi([2, 3])).unwrap();
        assert_eq!(b.cardinality(), 4);
        let e = b.enumerate();
        assert_eq!(e[0], mi([1, 2]));
        assert_eq!(e.len(), 4);
        assert!(IndexBox::new(mi([2, 0]), mi([1, 1])).is_err());
    }

    #[test]
    fn positions_are_consistent() {
        let en = BoxEnumeration::new(&IndexBox::from_multiplicity(&[3, 2, 2]));
        assert_eq!(en.len(), 12);
        for (i, k) in en.elements().iter().enumerate() {
            assert_eq!(en.position(k), Some(i));
        }
        assert_eq!(en.position(&mi([3, 0, 0])), None);
    }

    #[test]
    fn linear_extension_exhaustive() {
        // every box of cardinality <= 256 with up to 4 axes and extents <= 4
        for n in 1..=4usize {
            let shape = IndexBox::from_origin(MultiIndex(vec![3; n]));
            for hi in shape.enumerate() {
                let b = IndexBox::from_origin(hi);
                if b.cardinality() > 256 {
                    continue;
                }
                let e = b.enumerate();
                assert_eq!(e.len(), b.cardinality());
                for w in e.windows(2) {
                    assert_eq!(grevlex_unchecked(&w[0].0, &w[1].0), Ordering::Less);
                }
                for k in &e {
                    for l in &e {
                        if k != l && leq_partial(k, l).unwrap() {
                            assert_eq!(cmp_grevlex(k, l).unwrap(), Ordering::Less, "{k} {l}");
                        }
                    }
                }
            }
        }
    }

    fn triple() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
        (1usize..5).prop_flat_map(|n| {
            (
                prop::collection::vec(0u32..4, n),
                prop::collection::vec(0u32..4, n),
                prop::collection::vec(0u32..4, n),
            )
        })
    }

    proptest! {
        #[test]
        fn grevlex_is_a_total_order((a, b, c) in triple()) {
            let (a, b, c) = (MultiIndex(a), MultiIndex(b), MultiIndex(c));
            let ab = cmp_grevlex(&a, &b).unwrap();
            let ba = cmp_grevlex(&b, &a).unwrap();
            prop_assert_eq!(ab, ba.reverse());
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            let bc = cmp_grevlex(&b, &c).unwrap();
            if ab != Ordering::Greater && bc != Ordering::Greater {
                prop_assert_ne!(cmp_grevlex(&a, &c).unwrap(), Ordering::Greater);
            }
        }
    }

    #[test]
    fn json_is_a_plain_array() {
        let k = mi([1, 0, 2]);
        assert_eq!(serde_json::to_string(&k).unwrap(), "[1,0,2]");
        let back: MultiIndex = serde_json::from_str("[1,0,2]").unwrap();
        assert_eq!(back, k);
    }
}
