use crate::error::{invalid, Error, Result};
use crate::fock::FockState;
use crate::qudit::register_size;

/// `qudit_count` qudits of dimension `d`, each on its own block of `d` modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiRailRegister {
    qudit_count: usize,
    d: usize,
}

/// Result of reading a Fock state back as qudit levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Codeword(Vec<usize>),
    /// Some block does not hold exactly one photon.
    Leakage,
}

impl MultiRailRegister {
    pub fn new(qudit_count: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(invalid(format!("qudit dimension must be at least 2, got {d}")));
        }
        register_size(d, qudit_count)?;
        Ok(Self { qudit_count, d })
    }

    pub fn qudit_count(&self) -> usize {
        self.qudit_count
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn mode_count(&self) -> usize {
        self.qudit_count * self.d
    }

    pub fn mode(&self, qudit: usize, level: usize) -> usize {
        qudit * self.d + level
    }

    pub fn encode(&self, levels: &[usize]) -> Result<FockState> {
        if levels.len() != self.qudit_count {
            return Err(Error::DimensionMismatch {
                expected: self.qudit_count,
                found: levels.len(),
            });
        }
        let mut occ = vec![0u32; self.mode_count()];
        for (q, &l) in levels.iter().enumerate() {
            if l >= self.d {
                return Err(invalid(format!("level {l} out of range for d = {}", self.d)));
            }
            occ[self.mode(q, l)] = 1;
        }
        Ok(FockState::new(occ))
    }

    pub fn decode(&self, state: &FockState) -> Result<Decoded> {
        if state.mode_count() != self.mode_count() {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count(),
                found: state.mode_count(),
            });
        }
        let mut levels = Vec::with_capacity(self.qudit_count);
        for block in state.occupations().chunks(self.d) {
            if block.iter().sum::<u32>() != 1 {
                return Ok(Decoded::Leakage);
            }
            levels.push(block.iter().position(|&n| n == 1).expect("one photon"));
        }
        Ok(Decoded::Codeword(levels))
    }

    /// Levels of codeword `index` (site 0 most significant).
    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.qudit_count];
        for q in (0..self.qudit_count).rev() {
            levels[q] = index % self.d;
            index /= self.d;
        }
        levels
    }

    /// All `d^n` codewords in qudit-register index order.
    pub fn codewords(&self) -> Vec<FockState> {
        let count = self.d.pow(self.qudit_count as u32);
        (0..count)
            .map(|i| self.encode(&self.levels(i)).expect("valid levels"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_examples() {
        let r = MultiRailRegister::new(1, 3).unwrap();
        assert_eq!(r.encode(&[2]).unwrap(), FockState::new(vec![0, 0, 1]));
        let r = MultiRailRegister::new(2, 2).unwrap();
        assert_eq!(r.encode(&[1, 0]).unwrap(), FockState::new(vec![0, 1, 1, 0]));
        let r = MultiRailRegister::new(1, 3).unwrap();
        assert_eq!(r.decode(&FockState::new(vec![2, 0, 0])).unwrap(), Decoded::Leakage);
        assert_eq!(r.decode(&FockState::new(vec![0, 0, 0])).unwrap(), Decoded::Leakage);
        assert!(r.decode(&FockState::new(vec![1, 0])).is_err());
        assert!(r.encode(&[3]).is_err());
        assert!(r.encode(&[0, 0]).is_err());
    }

    #[test]
    fn round_trip_all_codewords() {
        for d in 2..=5 {
            for n in 1..=2 {
                let r = MultiRailRegister::new(n, d).unwrap();
                let words = r.codewords();
                assert_eq!(words.len(), d.pow(n as u32));
                for (i, w) in words.iter().enumerate() {
                    assert_eq!(w.photon_count(), n);
                    assert_eq!(r.decode(w).unwrap(), Decoded::Codeword(r.levels(i)));
                }
            }
        }
    }
}
