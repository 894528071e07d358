use serde::{Deserialize, Serialize};

use super::{set_range, word_count, Bitmask};
use crate::error::{Error, Result};

/// Uncompressed row-major run-length encoding.
///
/// `counts` alternates background and foreground runs, starting with
/// background. A leading `0` means the scan starts on a foreground pixel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub counts: Vec<u64>,
    pub width: u32,
    pub height: u32,
}

impl RleMask {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::ZeroDimension {
                width: self.width,
                height: self.height,
            });
        }
        if self.counts.is_empty() {
            return Err(Error::InvalidRle("no runs".into()));
        }
        if let Some(i) = self.counts.iter().skip(1).position(|&c| c == 0) {
            return Err(Error::InvalidRle(format!("zero-length run at index {}", i + 1)));
        }
        let total = self
            .counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::InvalidRle("run total overflows".into()))?;
        let expected = u64::from(self.width) * u64::from(self.height);
        if total != expected {
            return Err(Error::InvalidRle(format!("counts sum to {total}, expected {expected}")));
        }
        Ok(())
    }

    /// Foreground pixel count, read off the odd runs.
    pub fn area(&self) -> u64 {
        self.counts.iter().skip(1).step_by(2).sum()
    }
}

pub fn encode_rle(m: &Bitmask) -> RleMask {
    let n = m.len();
    let mut counts = Vec::new();
    let mut pos = 0usize;
    loop {
        let one = m.next_one(pos).unwrap_or(n);
        counts.push((one - pos) as u64);
        if one == n {
            break;
        }
        let zero = m.next_zero(one);
        counts.push((zero - one) as u64);
        pos = zero;
        if pos == n {
            break;
        }
    }
    RleMask {
        counts,
        width: m.width,
        height: m.height,
    }
}

pub fn decode_rle(r: &RleMask) -> Result<Bitmask> {
    r.validate()?;
    let mut words = vec![0u64; word_count(r.width, r.height)];
    let mut pos = 0usize;
    for (i, &c) in r.counts.iter().enumerate() {
        let end = pos + c as usize;
        if i % 2 == 1 {
            set_range(&mut words, pos, end);
        }
        pos = end;
    }
    Ok(Bitmask::from_words(r.width, r.height, words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_masks() {
        let z = Bitmask::empty(3, 3).unwrap();
        assert_eq!(encode_rle(&z).counts, vec![9]);
        let f = Bitmask::full(3, 3).unwrap();
        assert_eq!(encode_rle(&f).counts, vec![0, 9]);
    }

    #[test]
    fn runs_are_row_major() {
        // row 0: .#.  row 1: ##.
        let m = Bitmask::from_bools(3, 2, &[false, true, false, true, true, false]).unwrap();
        assert_eq!(encode_rle(&m).counts, vec![1, 1, 1, 2, 1]);
    }

    #[test]
    fn decode_rejects_bad_sums() {
        let r = RleMask {
            counts: vec![4, 4],
            width: 3,
            height: 3,
        };
        assert!(matches!(decode_rle(&r), Err(Error::InvalidRle(_))));
        let r = RleMask {
            counts: vec![4, 0, 5],
            width: 3,
            height: 3,
        };
        assert!(matches!(decode_rle(&r), Err(Error::InvalidRle(_))));
        let r = RleMask {
            counts: vec![],
            width: 3,
            height: 3,
        };
        assert!(matches!(decode_rle(&r), Err(Error::InvalidRle(_))));
    }

    #[test]
    fn area_from_runs() {
        let r = RleMask {
            counts: vec![0, 3, 2, 4],
            width: 3,
            height: 3,
        };
        assert_eq!(r.area(), 7);
        assert_eq!(decode_rle(&r).unwrap().area(), 7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(w in 1u32..40, h in 1u32..40, seed in any::<u64>(), density in 0.0f64..1.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = Bitmask::from_fn(w, h, |_, _| rng.random_bool(density)).unwrap();
            let r = encode_rle(&m);
            prop_assert!(r.validate().is_ok());
            prop_assert_eq!(r.area(), m.area());
            prop_assert_eq!(decode_rle(&r).unwrap(), m);
        }
    }
}
