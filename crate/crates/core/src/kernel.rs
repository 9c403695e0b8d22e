//! Production multiplication path.
//!
//! `z_r = sum over p XOR q = r of omega(p, q) x_p y_q`, with the twist
//! supplied by the automaton. Each output coefficient accumulates its terms
//! in ascending `p` (lexicographic over `(p, q)`), so results are bit-for-bit
//! reproducible whether the outputs are computed serially or in parallel,
//! with or without the memoizing cache.

use dashmap::DashMap;
use rayon::prelude::*;

use crate::algebra::{BasisIndex, ProductVariant, Sign};
use crate::automaton::twist;
use crate::oracle::{DenseVector, LevelMismatch};
use crate::periodicity::canonical_pair;

/// Kernel contract violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    LevelMismatch(#[from] LevelMismatch),
    #[error("cache built for {cache} cannot serve {requested}")]
    CacheVariantMismatch {
        cache: ProductVariant,
        requested: ProductVariant,
    },
}

/// Memoized twist lookups keyed by canonical pairs.
///
/// Canonicalizing first shrinks the key space from every pair that occurs to
/// the far smaller set of canonical representatives; every cached sign equals
/// the twist of its key, so hits and misses are indistinguishable in output.
/// Shareable across threads; insertion is synchronized.
#[derive(Debug)]
pub struct TwistCache {
    variant: ProductVariant,
    table: DashMap<(u64, u64), Sign>,
}

impl TwistCache {
    pub fn new(variant: ProductVariant) -> Self {
        Self {
            variant,
            table: DashMap::new(),
        }
    }

    pub fn variant(&self) -> ProductVariant {
        self.variant
    }

    /// Number of cached canonical pairs.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Twist evaluation through the canonicalizer and cache.
///
/// Pairs decided by the known identities short-circuit without touching the
/// cache; everything else reduces to its canonical pair, whose sign is
/// computed once and reused. Always equal to [`twist`]`(p, q, variant)`.
///
/// Panics if the cache was built for a different product.
pub fn twist_memo(
    p: BasisIndex,
    q: BasisIndex,
    variant: ProductVariant,
    cache: &TwistCache,
) -> Sign {
    assert_eq!(
        cache.variant, variant,
        "twist cache built for {} used with {}",
        cache.variant, variant
    );
    if p.is_zero() || q.is_zero() {
        return Sign::Plus;
    }
    if p == q {
        return Sign::Minus;
    }
    let ((cp, cq), total_sign) = canonical_pair(p, q);
    let cached = *cache
        .table
        .entry((cp.value(), cq.value()))
        .or_insert_with(|| twist(cp, cq, variant));
    total_sign * cached
}

/// Below this coefficient count the parallel split costs more than it saves.
const PARALLEL_THRESHOLD: usize = 512;

/// The XOR-indexed convolution `z_r = sum_{p XOR q = r} omega(p, q) x_p y_q`.
///
/// With a cache, twists route through [`twist_memo`]; without one they come
/// straight from the automaton. Both give identical bits. Large outputs are
/// computed in parallel over the output index; each output's sum is still
/// accumulated in its fixed order.
pub fn multiply_fast(
    x: &DenseVector,
    y: &DenseVector,
    variant: ProductVariant,
    cache: Option<&TwistCache>,
) -> Result<DenseVector, KernelError> {
    if x.level() != y.level() {
        return Err(LevelMismatch {
            left: x.level(),
            right: y.level(),
        }
        .into());
    }
    if let Some(c) = cache {
        if c.variant != variant {
            return Err(KernelError::CacheVariantMismatch {
                cache: c.variant,
                requested: variant,
            });
        }
    }

    let n = x.len();
    let xs = x.coefficients();
    let ys = y.coefficients();
    let one_output = |r: usize| {
        let mut acc = 0.0f64;
        for (p, &xp) in xs.iter().enumerate() {
            let q = p ^ r;
            let sign = match cache {
                Some(c) => twist_memo(
                    BasisIndex::new(p as u64),
                    BasisIndex::new(q as u64),
                    variant,
                    c,
                ),
                None => twist(BasisIndex::new(p as u64), BasisIndex::new(q as u64), variant),
            };
            acc += sign.as_f64() * xp * ys[q];
        }
        acc
    };

    let coefficients: Vec<f64> = if n >= PARALLEL_THRESHOLD {
        (0..n).into_par_iter().map(one_output).collect()
    } else {
        (0..n).map(one_output).collect()
    };
    Ok(DenseVector::from_coefficients(coefficients).expect("length preserved"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ProductVariant::*;
    use crate::oracle::multiply;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn bi(v: u64) -> BasisIndex {
        BasisIndex::new(v)
    }

    fn e(index: u64, level: u32) -> DenseVector {
        DenseVector::basis(bi(index), level).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, level: u32) -> DenseVector {
        let coefficients = (0..1usize << level)
            .map(|_| (rng.next_u64() as f64 / u64::MAX as f64) * 2.0 - 1.0)
            .collect();
        DenseVector::from_coefficients(coefficients).unwrap()
    }

    #[test]
    fn basis_inputs_multiply_exactly() {
        let product = multiply_fast(&e(25, 5), &e(17, 5), P3, None).unwrap();
        assert_eq!(product, e(8, 5));
        let cache = TwistCache::new(P3);
        let cached = multiply_fast(&e(25, 5), &e(17, 5), P3, Some(&cache)).unwrap();
        assert_eq!(cached, e(8, 5));
    }

    #[test]
    fn scalar_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_vector(&mut rng, 4);
        let two = e(0, 4).scaled(2.0);
        for v in ProductVariant::ALL {
            let product = multiply_fast(&two, &x, v, None).unwrap();
            assert!(product.max_abs_diff(&x.scaled(2.0)) == 0.0);
        }
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let err = multiply_fast(&e(1, 2), &e(1, 3), P0, None).unwrap_err();
        assert!(matches!(err, KernelError::LevelMismatch(_)));
    }

    #[test]
    fn cache_variant_mismatch_is_rejected() {
        let cache = TwistCache::new(P0);
        let err = multiply_fast(&e(1, 2), &e(1, 2), P1, Some(&cache)).unwrap_err();
        assert_eq!(
            err,
            KernelError::CacheVariantMismatch {
                cache: P0,
                requested: P1
            }
        );
    }

    #[test]
    fn memo_matches_twist() {
        for v in ProductVariant::ALL {
            let cache = TwistCache::new(v);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..4000 {
                let p = bi(rng.next_u64() & ((1 << 20) - 1));
                let q = bi(rng.next_u64() & ((1 << 20) - 1));
                assert_eq!(twist_memo(p, q, v, &cache), twist(p, q, v));
            }
            // Second pass is all cache hits and must agree with itself.
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..4000 {
                let p = bi(rng.next_u64() & ((1 << 20) - 1));
                let q = bi(rng.next_u64() & ((1 << 20) - 1));
                assert_eq!(twist_memo(p, q, v, &cache), twist(p, q, v));
            }
        }
    }

    #[test]
    fn memo_example_and_identity_short_circuit() {
        let cache = TwistCache::new(P2);
        assert_eq!(
            twist_memo(bi(5), bi(481), P2, &cache),
            twist(bi(5), bi(9), P2)
        );
        let before = cache.len();
        assert_eq!(twist_memo(bi(0), bi(77), P2, &cache), Sign::Plus);
        assert_eq!(twist_memo(bi(77), bi(0), P2, &cache), Sign::Plus);
        assert_eq!(twist_memo(bi(77), bi(77), P2, &cache), Sign::Minus);
        assert_eq!(cache.len(), before, "decided pairs must not touch the cache");
    }

    #[test]
    #[should_panic(expected = "twist cache built for")]
    fn memo_panics_on_wrong_variant() {
        let cache = TwistCache::new(P0);
        let _ = twist_memo(bi(5), bi(9), P1, &cache);
    }

    #[test]
    fn matches_oracle_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for level in 1..=5u32 {
            for v in ProductVariant::ALL {
                let x = random_vector(&mut rng, level);
                let y = random_vector(&mut rng, level);
                let fast = multiply_fast(&x, &y, v, None).unwrap();
                let reference = multiply(&x, &y, v).unwrap();
                assert!(
                    fast.max_abs_diff(&reference) <= 1e-12,
                    "kernel disagrees with reference at level {level} under {v}"
                );
            }
        }
    }

    #[test]
    fn cached_and_uncached_are_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for v in ProductVariant::ALL {
            let cache = TwistCache::new(v);
            for level in [3u32, 6] {
                let x = random_vector(&mut rng, level);
                let y = random_vector(&mut rng, level);
                let plain = multiply_fast(&x, &y, v, None).unwrap();
                let cached = multiply_fast(&x, &y, v, Some(&cache)).unwrap();
                let warm = multiply_fast(&x, &y, v, Some(&cache)).unwrap();
                assert_eq!(plain, cached);
                assert_eq!(plain, warm);
            }
        }
        // One pass over the parallel path.
        let cache = TwistCache::new(P3);
        let x = random_vector(&mut rng, 10);
        let y = random_vector(&mut rng, 10);
        let plain = multiply_fast(&x, &y, P3, None).unwrap();
        let cached = multiply_fast(&x, &y, P3, Some(&cache)).unwrap();
        assert_eq!(plain, cached);
    }
}
