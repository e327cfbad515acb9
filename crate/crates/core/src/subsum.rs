//! Exhaustive vanishing-subsum detection over signed terms.

use num_traits::Zero;
use std::ops::Add;

/// Bitmasks of every nonempty proper subset of `terms` whose sum is zero,
/// ordered by size and then lexicographically by member indices.
///
/// Scans all `2^n - 2` candidates; `n` must stay below 32.
pub fn vanishing_masks<T>(terms: &[T]) -> Vec<u32>
where
    T: Zero + Clone,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    let n = terms.len();
    assert!(n < 32, "subset scan supports fewer than 32 terms");
    let full = (1u32 << n) - 1;
    let mut hits: Vec<u32> = (1..full)
        .filter(|&mask| {
            let mut acc = T::zero();
            for (i, t) in terms.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = &acc + t;
                }
            }
            acc.is_zero()
        })
        .collect();
    hits.sort_by_key(|&m| (m.count_ones(), mask_indices(m)));
    hits
}

/// Zero-based member indices of a mask, ascending.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// True when some nonempty proper subset of `terms` sums to zero.
pub fn has_vanishing_subsum<T>(terms: &[T]) -> bool
where
    T: Zero + Clone,
    for<'a> &'a T: Add<&'a T, Output = T>,
{
    !vanishing_masks(terms).is_empty()
}
