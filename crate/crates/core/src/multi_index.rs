//! Bitstring multi-indices `ε ∈ {0,1}^k` of order `n = Σ (1 + ε_i)`.
//!
//! They are in bijection with ordered index sets `0 = i_0 < … < i_k = n`
//! whose steps are 1 or 2, via `i_j = i_{j-1} + 1 + ε_j`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpsilonMultiIndex {
    bits: Vec<bool>,
}

impl EpsilonMultiIndex {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Length `k`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `n = Σ (1 + ε_i)`; always `k ≤ n ≤ 2k`.
    pub fn order(&self) -> usize {
        self.bits.iter().map(|&b| 1 + b as usize).sum()
    }

    /// The index set `{i_0 = 0, …, i_k = n}`.
    pub fn index_set(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(0);
        let mut i = 0;
        for &b in &self.bits {
            i += 1 + b as usize;
            out.push(i);
        }
        out
    }

    /// Inverse of [`index_set`](Self::index_set); `None` if the set does not
    /// start at 0, is not increasing, or has a step larger than 2.
    pub fn from_index_set(set: &[usize]) -> Option<Self> {
        if set.first() != Some(&0) {
            return None;
        }
        set.windows(2)
            .map(|w| match w[1].checked_sub(w[0]) {
                Some(1) => Some(false),
                Some(2) => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    fn to_string_bits(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl std::fmt::Display for EpsilonMultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.to_string_bits())
    }
}

/// All multi-indices of order `n`, ordered by length and then bits.
pub fn epsilon_enumerate(n: usize) -> Vec<EpsilonMultiIndex> {
    // strings of order n end in 0 (prefix of order n-1) or 1 (prefix of order n-2)
    let mut by_order: Vec<Vec<Vec<bool>>> = vec![vec![vec![]]];
    for m in 1..=n {
        let mut cur = Vec::new();
        for prefix in &by_order[m - 1] {
            let mut s = prefix.clone();
            s.push(false);
            cur.push(s);
        }
        if m >= 2 {
            for prefix in &by_order[m - 2] {
                let mut s = prefix.clone();
                s.push(true);
                cur.push(s);
            }
        }
        by_order.push(cur);
    }
    let mut out: Vec<EpsilonMultiIndex> = by_order
        .swap_remove(n)
        .into_iter()
        .map(EpsilonMultiIndex::new)
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.bits.cmp(&b.bits)));
    out
}

/// Number of ways `child` arises from a multi-index of order
/// `child.order() - 1` by inserting a 0 at any position, or by turning a 0
/// into a 1 (counted twice). Brute force over all parents.
pub fn parent_moves(child: &EpsilonMultiIndex) -> usize {
    let n = child.order();
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    for parent in epsilon_enumerate(n - 1) {
        for pos in 0..=parent.len() {
            let mut bits = parent.bits.clone();
            bits.insert(pos, false);
            if bits == child.bits {
                count += 1;
            }
        }
        for pos in 0..parent.len() {
            if !parent.bits[pos] {
                let mut bits = parent.bits.clone();
                bits[pos] = true;
                if bits == child.bits {
                    count += 2;
                }
            }
        }
    }
    count
}
