use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::linalg::binomial;

/// Photon occupation numbers of `M` optical modes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockState(Vec<u32>);

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// A single photon in `mode` out of `modes`.
    pub fn single(modes: usize, mode: usize) -> Self {
        let mut occ = vec![0; modes];
        occ[mode] = 1;
        Self(occ)
    }

    pub fn occupations(&self) -> &[u32] {
        &self.0
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn photon_count(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    /// Concatenates the modes of `self` and `other`.
    pub fn concat(&self, other: &FockState) -> FockState {
        let mut occ = self.0.clone();
        occ.extend_from_slice(&other.0);
        FockState(occ)
    }

    /// Mode indices repeated by their occupation, e.g. `|2,0,1⟩ → [0, 0, 2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize))
            .collect()
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

impl From<Vec<u32>> for FockState {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// All Fock states with `mode_count` modes and `photon_count` photons, in
/// descending lexicographic order of the occupation vector.
#[derive(Debug)]
pub struct FockBasis {
    mode_count: usize,
    photon_count: usize,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.mode_count == other.mode_count && self.photon_count == other.photon_count
    }
}

impl FockBasis {
    pub fn new(mode_count: usize, photon_count: usize) -> Self {
        let mut states = Vec::with_capacity(
            binomial((mode_count + photon_count).saturating_sub(1) as u64, photon_count as u64)
                as usize,
        );
        if mode_count == 0 {
            // Only the empty vacuum exists; with photons there is nowhere to put them.
            if photon_count == 0 {
                states.push(FockState(Vec::new()));
            }
        } else {
            let mut occ = vec![0u32; mode_count];
            fill(&mut occ, 0, photon_count as u32, &mut states);
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            mode_count,
            photon_count,
            states,
            index,
        }
    }

    /// Process-wide cached basis for `(mode_count, photon_count)`.
    pub fn shared(mode_count: usize, photon_count: usize) -> Arc<FockBasis> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<FockBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.lock().unwrap().get(&(mode_count, photon_count)) {
            return b.clone();
        }
        // Built outside the lock; a racing thread may build the same basis twice.
        let basis = Arc::new(FockBasis::new(mode_count, photon_count));
        cache
            .lock()
            .unwrap()
            .entry((mode_count, photon_count))
            .or_insert(basis)
            .clone()
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn photon_count(&self) -> usize {
        self.photon_count
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &FockState {
        &self.states[i]
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

fn fill(occ: &mut [u32], mode: usize, remaining: u32, out: &mut Vec<FockState>) {
    if mode == occ.len() - 1 {
        occ[mode] = remaining;
        out.push(FockState(occ.to_vec()));
        occ[mode] = 0;
        return;
    }
    for n in (0..=remaining).rev() {
        occ[mode] = n;
        fill(occ, mode + 1, remaining - n, out);
    }
    occ[mode] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes_match_binomial() {
        for m in 1..6 {
            for n in 0..5 {
                let b = FockBasis::new(m, n);
                assert_eq!(b.len() as u64, binomial((m + n - 1) as u64, n as u64));
                for s in b.states() {
                    assert_eq!(s.photon_count(), n);
                    assert_eq!(s.mode_count(), m);
                }
            }
        }
    }

    #[test]
    fn ordering_is_descending_lexicographic() {
        let b = FockBasis::new(3, 2);
        let got: Vec<_> = b.states().iter().map(|s| s.occupations().to_vec()).collect();
        assert_eq!(
            got,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        for w in b.states().windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn degenerate_bases_are_vacuum_singletons() {
        let b = FockBasis::new(0, 0);
        assert_eq!(b.len(), 1);
        let b = FockBasis::new(4, 0);
        assert_eq!(b.len(), 1);
        assert_eq!(b.state(0), &FockState::vacuum(4));
        assert!(FockBasis::new(0, 2).is_empty());
    }

    #[test]
    fn shared_basis_is_cached() {
        let a = FockBasis::shared(5, 3);
        let b = FockBasis::shared(5, 3);
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn states_with_different_mode_counts_differ() {
        assert_ne!(FockState::new(vec![1, 0]), FockState::new(vec![1, 0, 0]));
        assert_eq!(FockState::new(vec![2, 0, 1]).mode_list(), vec![0, 0, 2]);
    }
}
