//! Periodicity of the twist: checked identities and the reduction they
//! enable.
//!
//! The twist of a large pair equals the twist of a much smaller one. Two
//! modular identities do the shrinking (one reduces the larger index when
//! the octaves differ, one reduces both indices of an equal-octave pair to
//! just above the octave of their XOR) and antisymmetry reorients pairs so
//! the first applies. [`canonicalize`] composes them to a fixpoint and
//! records which rule justified each step.

use crate::algebra::{xor_index, BasisIndex, ProductVariant, Sign};
use crate::automaton::twist;

/// Contract violations of the periodicity operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PeriodicityError {
    #[error("p must be nonzero")]
    ZeroP,
    #[error("q must be nonzero")]
    ZeroQ,
    #[error("p and q must be distinct")]
    EqualPair,
    #[error("p and q must share an octave (bit lengths {p_bits} and {q_bits})")]
    OctaveMismatch { p_bits: u32, q_bits: u32 },
    #[error("q = {q} must be at least 2^{n}")]
    QBelowOctave { q: u64, n: u32 },
    #[error("q = {q} must lie in [2^N, 2^(N+1)) for N = {n}")]
    QOutsideOctave { q: u64, n: u32 },
    #[error("shifted index would exceed the 63-bit cap")]
    IndexOverflow,
}

/// Which identity justified a reduction step.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ReductionRule {
    /// Modular reduction of the larger index: `(p, q) -> (p, 2^N + q mod 2^N)`
    /// with `N` the bit length of `p`. Twist-preserving.
    ModularT4,
    /// Joint modular reduction of an equal-octave pair:
    /// `(p, q) -> (2^N + p mod 2^N, 2^N + q mod 2^N)` with `N` the bit length
    /// of `p XOR q`. Twist-preserving; the XOR itself is unchanged.
    ModularT5,
    /// Argument swap; flips the twist of a distinct nonzero pair.
    SwapAntisym,
}

impl ReductionRule {
    pub const fn name(self) -> &'static str {
        match self {
            Self::ModularT4 => "modular-t4",
            Self::ModularT5 => "modular-t5",
            Self::SwapAntisym => "swap-antisym",
        }
    }

    /// The factor relating the twist before the step to the twist after.
    pub const fn sign_factor(self) -> Sign {
        match self {
            Self::ModularT4 | Self::ModularT5 => Sign::Plus,
            Self::SwapAntisym => Sign::Minus,
        }
    }
}

impl std::fmt::Display for ReductionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One application of a reduction rule.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ReductionStep {
    pub rule: ReductionRule,
    pub before: (BasisIndex, BasisIndex),
    pub after: (BasisIndex, BasisIndex),
    pub sign_factor: Sign,
    /// The octave parameter `N` of the applied rule; 0 for swaps.
    pub octave_n: u32,
}

/// The full reduction of a pair to its canonical form.
///
/// `total_sign` is the product of the step factors, so
/// `twist(p, q, v) = total_sign * twist(canonical, v)` for every product.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub canonical: (BasisIndex, BasisIndex),
    pub total_sign: Sign,
}

impl ReductionTrace {
    /// True when the input was decided outright (zero or equal indices).
    pub fn is_terminal_case(&self) -> bool {
        let (p, q) = self.canonical;
        self.steps.is_empty() && (p.is_zero() || q.is_zero() || p == q)
    }
}

const fn pow2(n: u32) -> u64 {
    1u64 << n
}

/// Reduces the larger index of a cross-octave pair.
///
/// Requires `p > 0` and `q >= 2^N` for `N` the bit length of `p`; returns
/// `(p, 2^N + q mod 2^N)`, whose second component lies in `[2^N, 2^(N+1))`.
/// Already-reduced pairs come back unchanged.
pub fn reduce_t4(
    p: BasisIndex,
    q: BasisIndex,
) -> Result<(BasisIndex, BasisIndex), PeriodicityError> {
    if p.is_zero() {
        return Err(PeriodicityError::ZeroP);
    }
    let n = p.bit_length();
    if q.value() < pow2(n) {
        return Err(PeriodicityError::QBelowOctave { q: q.value(), n });
    }
    let reduced = pow2(n) + (q.value() % pow2(n));
    Ok((p, BasisIndex::new(reduced)))
}

/// Jointly reduces an equal-octave pair.
///
/// Requires distinct nonzero `p, q` of equal bit length; with `N` the bit
/// length of `p XOR q`, returns `(2^N + p mod 2^N, 2^N + q mod 2^N)`. The
/// XOR of the pair is preserved exactly.
pub fn reduce_t5(
    p: BasisIndex,
    q: BasisIndex,
) -> Result<(BasisIndex, BasisIndex), PeriodicityError> {
    if p.is_zero() {
        return Err(PeriodicityError::ZeroP);
    }
    if q.is_zero() {
        return Err(PeriodicityError::ZeroQ);
    }
    if p == q {
        return Err(PeriodicityError::EqualPair);
    }
    if p.bit_length() != q.bit_length() {
        return Err(PeriodicityError::OctaveMismatch {
            p_bits: p.bit_length(),
            q_bits: q.bit_length(),
        });
    }
    let n = xor_index(p, q).bit_length();
    let map = |v: BasisIndex| BasisIndex::new(pow2(n) + (v.value() % pow2(n)));
    Ok((map(p), map(q)))
}

/// The bare reduction loop: canonical pair plus accumulated sign, with an
/// optional step recorder. Shared by [`canonicalize`] and the memoizing fast
/// path, which skips the allocation.
fn reduce_pair(
    mut p: BasisIndex,
    mut q: BasisIndex,
    mut record: Option<&mut Vec<ReductionStep>>,
) -> ((BasisIndex, BasisIndex), Sign) {
    let mut total_sign = Sign::Plus;
    let push = |rule: ReductionRule,
                    before: (BasisIndex, BasisIndex),
                    after: (BasisIndex, BasisIndex),
                    octave_n: u32,
                    record: &mut Option<&mut Vec<ReductionStep>>| {
        if let Some(steps) = record.as_deref_mut() {
            steps.push(ReductionStep {
                rule,
                before,
                after,
                sign_factor: rule.sign_factor(),
                octave_n,
            });
        }
    };

    loop {
        // Decided pairs terminate the loop outright.
        if p.is_zero() || q.is_zero() || p == q {
            return ((p, q), total_sign);
        }

        if p.bit_length() == q.bit_length() {
            // Equal octaves: joint reduction, which needs no reorientation.
            let n = xor_index(p, q).bit_length();
            if p.bit_length() == n + 1 {
                return ((p, q), total_sign);
            }
            let (rp, rq) = reduce_t5(p, q).expect("preconditions checked");
            push(ReductionRule::ModularT5, (p, q), (rp, rq), n, &mut record);
            (p, q) = (rp, rq);
        } else {
            // Distinct octaves: orient the smaller index first, then fold the
            // larger one down.
            if p > q {
                push(ReductionRule::SwapAntisym, (p, q), (q, p), 0, &mut record);
                total_sign = total_sign.flipped();
                (p, q) = (q, p);
            }
            let n = p.bit_length();
            if q.bit_length() == n + 1 {
                return ((p, q), total_sign);
            }
            let (rp, rq) = reduce_t4(p, q).expect("preconditions checked");
            push(ReductionRule::ModularT4, (p, q), (rp, rq), n, &mut record);
            (p, q) = (rp, rq);
        }
    }
}

/// Reduces a pair to a canonical small pair with the same twist, up to sign.
///
/// Zero or equal indices stop immediately: their twist is already decided.
/// Otherwise the loop applies, until fixpoint: a swap when the octaves differ
/// and the pair is misoriented, the cross-octave reduction, and the joint
/// equal-octave reduction. Each modular step strictly shrinks the pair, so
/// this terminates with both canonical components below `2 * 2^bits(p XOR q)`
/// of the canonical pair.
pub fn canonicalize(p: BasisIndex, q: BasisIndex) -> ReductionTrace {
    let mut steps = Vec::new();
    let (canonical, total_sign) = reduce_pair(p, q, Some(&mut steps));
    ReductionTrace {
        steps,
        canonical,
        total_sign,
    }
}

/// Canonical pair and sign without recording steps; the hot-path form.
pub(crate) fn canonical_pair(p: BasisIndex, q: BasisIndex) -> ((BasisIndex, BasisIndex), Sign) {
    reduce_pair(p, q, None)
}

fn t2_bounds(p: BasisIndex, q: BasisIndex) -> Result<u32, PeriodicityError> {
    if p.is_zero() {
        return Err(PeriodicityError::ZeroP);
    }
    let n = p.bit_length();
    if q.bit_length() != n + 1 {
        return Err(PeriodicityError::QOutsideOctave { q: q.value(), n });
    }
    Ok(n)
}

/// Checks the first periodicity identity
/// `omega(p, q) = omega(p, q + k 2^N)` for `2^(N-1) <= p < 2^N <= q < 2^(N+1)`.
///
/// Always true; returned as a boolean so harnesses can count violations.
pub fn check_periodicity_t2(
    p: BasisIndex,
    q: BasisIndex,
    k: u64,
    variant: ProductVariant,
) -> Result<bool, PeriodicityError> {
    let n = t2_bounds(p, q)?;
    let shifted = k
        .checked_mul(pow2(n))
        .and_then(|offset| q.value().checked_add(offset))
        .and_then(BasisIndex::try_new)
        .ok_or(PeriodicityError::IndexOverflow)?;
    Ok(twist(p, q, variant) == twist(p, shifted, variant))
}

/// Checks the second periodicity identity
/// `omega(p, q) = omega(p + k 2^N, q + k 2^N)` for `p, q` both in
/// `[2^(N-1), 2^N)`.
pub fn check_periodicity_t3(
    p: BasisIndex,
    q: BasisIndex,
    k: u64,
    variant: ProductVariant,
) -> Result<bool, PeriodicityError> {
    if p.is_zero() {
        return Err(PeriodicityError::ZeroP);
    }
    if q.is_zero() {
        return Err(PeriodicityError::ZeroQ);
    }
    let n = p.bit_length();
    if q.bit_length() != n {
        return Err(PeriodicityError::OctaveMismatch {
            p_bits: n,
            q_bits: q.bit_length(),
        });
    }
    let shift = |v: BasisIndex| {
        k.checked_mul(pow2(n))
            .and_then(|offset| v.value().checked_add(offset))
            .and_then(BasisIndex::try_new)
            .ok_or(PeriodicityError::IndexOverflow)
    };
    let (sp, sq) = (shift(p)?, shift(q)?);
    Ok(twist(p, q, variant) == twist(sp, sq, variant))
}
