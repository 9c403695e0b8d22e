//! Core index arithmetic for the shuffle basis: basis indices under the XOR
//! group, the eight doubling-product tags, twist signs, and the doublet paths
//! that drive the twist automaton.

use std::fmt;

/// Index of a shuffle-basis vector `e_p`.
///
/// Indices are capped at 63 bits so that XOR and bit scans stay in a single
/// machine word; `C_63` vastly exceeds any practical dimension.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct BasisIndex(u64);

impl BasisIndex {
    /// Maximum representable width in bits.
    pub const MAX_BITS: u32 = 63;

    /// The group identity `e_0`.
    pub const ZERO: Self = Self(0);

    /// Wraps a raw index.
    ///
    /// Panics if `value` needs more than [`Self::MAX_BITS`] bits; use
    /// [`Self::try_new`] for untrusted input.
    pub const fn new(value: u64) -> Self {
        assert!(value < (1 << Self::MAX_BITS), "basis index exceeds 63 bits");
        Self(value)
    }

    /// Wraps a raw index, or `None` if it exceeds the 63-bit cap.
    pub const fn try_new(value: u64) -> Option<Self> {
        if value < (1 << Self::MAX_BITS) {
            Some(Self(value))
        } else {
            None
        }
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Number of bits in the binary representation; zero for the identity.
    ///
    /// For `p > 0` this is the unique `N` with `2^(N-1) <= p < 2^N`.
    pub const fn bit_length(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    /// The bit at position `i` (0 = least significant).
    pub const fn bit(self, i: u32) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl From<u32> for BasisIndex {
    fn from(value: u32) -> Self {
        Self(u64::from(value))
    }
}

impl TryFrom<u64> for BasisIndex {
    type Error = IndexOutOfRange;

    fn try_from(value: u64) -> Result<Self, IndexOutOfRange> {
        Self::try_new(value).ok_or(IndexOutOfRange(value))
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Error for raw values that do not fit in 63 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("index {0} does not fit in 63 bits")]
pub struct IndexOutOfRange(pub u64);

/// The group operation on basis indices: bitwise exclusive or.
///
/// Commutative and associative, with identity 0 and every element its own
/// inverse; `e_p e_q` always lands on `e_{xor_index(p, q)}`.
pub const fn xor_index(p: BasisIndex, q: BasisIndex) -> BasisIndex {
    BasisIndex(p.0 ^ q.0)
}

/// One of the eight doubling products.
///
/// `P0`..`P3` are the four primal products; `T0`..`T3` are their transposes,
/// whose basis product tables are the transposes of the primal tables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ProductVariant {
    P0,
    P1,
    P2,
    P3,
    T0,
    T1,
    T2,
    T3,
}

impl ProductVariant {
    /// All eight products, primal first.
    pub const ALL: [Self; 8] = [
        Self::P0,
        Self::P1,
        Self::P2,
        Self::P3,
        Self::T0,
        Self::T1,
        Self::T2,
        Self::T3,
    ];

    /// The four primal products.
    pub const PRIMAL: [Self; 4] = [Self::P0, Self::P1, Self::P2, Self::P3];

    /// Maps `Pk <-> Tk`; an involution.
    pub const fn transpose(self) -> Self {
        match self {
            Self::P0 => Self::T0,
            Self::P1 => Self::T1,
            Self::P2 => Self::T2,
            Self::P3 => Self::T3,
            Self::T0 => Self::P0,
            Self::T1 => Self::P1,
            Self::T2 => Self::P2,
            Self::T3 => Self::P3,
        }
    }

    pub const fn is_transpose(self) -> bool {
        matches!(self, Self::T0 | Self::T1 | Self::T2 | Self::T3)
    }

    /// The index `k` selecting the interior sign table shared by `Pk` and `Tk`.
    pub const fn interior_index(self) -> usize {
        match self {
            Self::P0 | Self::T0 => 0,
            Self::P1 | Self::T1 => 1,
            Self::P2 | Self::T2 => 2,
            Self::P3 | Self::T3 => 3,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Self::P0 => "P0",
            Self::P1 => "P1",
            Self::P2 => "P2",
            Self::P3 => "P3",
            Self::T0 => "T0",
            Self::T1 => "T1",
            Self::T2 => "T2",
            Self::T3 => "T3",
        }
    }
}

impl fmt::Display for ProductVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for unrecognized product names.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown product variant {0:?} (expected one of P0-P3, T0-T3)")]
pub struct UnknownVariant(pub String);

impl std::str::FromStr for ProductVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, UnknownVariant> {
        match s.to_ascii_uppercase().as_str() {
            "P0" => Ok(Self::P0),
            "P1" => Ok(Self::P1),
            "P2" => Ok(Self::P2),
            "P3" => Ok(Self::P3),
            "T0" => Ok(Self::T0),
            "T1" => Ok(Self::T1),
            "T2" => Ok(Self::T2),
            "T3" => Ok(Self::T3),
            _ => Err(UnknownVariant(s.to_owned())),
        }
    }
}

/// A sign factor, `+1` or `-1`.
///
/// Closed under multiplication with `+1` as identity; this is the codomain of
/// the twist function.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const fn value(self) -> i8 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }

    pub const fn as_f64(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub const fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    pub const fn flipped_if(self, condition: bool) -> Self {
        if condition {
            self.flipped()
        } else {
            self
        }
    }

    pub const fn times(self, other: Self) -> Self {
        if matches!(self, Self::Plus) {
            other
        } else {
            other.flipped()
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        self.times(rhs)
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self.flipped()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
        })
    }
}

/// One navigation symbol: a bit of `p` paired with the same-position bit of `q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Doublet {
    p_bit: bool,
    q_bit: bool,
}

impl Doublet {
    pub const fn new(p_bit: bool, q_bit: bool) -> Self {
        Self { p_bit, q_bit }
    }

    /// Builds from raw 0/1 bits; anything nonzero counts as 1.
    pub const fn from_bits(p_bit: u8, q_bit: u8) -> Self {
        Self::new(p_bit != 0, q_bit != 0)
    }

    pub const fn p_bit(self) -> bool {
        self.p_bit
    }

    pub const fn q_bit(self) -> bool {
        self.q_bit
    }

    /// Table index in `00, 01, 10, 11` order (p bit high).
    pub const fn index(self) -> usize {
        ((self.p_bit as usize) << 1) | (self.q_bit as usize)
    }
}

impl fmt::Display for Doublet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.p_bit as u8, self.q_bit as u8)
    }
}

/// The doublet sequence encoding a pair `[p;q]`, most significant first.
///
/// The width is exactly the larger of the two bit lengths, the shorter
/// operand being padded with leading zeros; `[0;0]` is the empty path.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DoubletPath {
    doublets: Vec<Doublet>,
}

impl DoubletPath {
    pub fn doublets(&self) -> &[Doublet] {
        &self.doublets
    }

    pub fn len(&self) -> usize {
        self.doublets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doublets.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Doublet> {
        self.doublets.iter()
    }

    /// Recovers the pair the path encodes.
    pub fn reconstruct(&self) -> (BasisIndex, BasisIndex) {
        let mut p = 0u64;
        let mut q = 0u64;
        for d in &self.doublets {
            p = (p << 1) | d.p_bit as u64;
            q = (q << 1) | d.q_bit as u64;
        }
        (BasisIndex(p), BasisIndex(q))
    }
}

impl<'a> IntoIterator for &'a DoubletPath {
    type Item = &'a Doublet;
    type IntoIter = std::slice::Iter<'a, Doublet>;

    fn into_iter(self) -> Self::IntoIter {
        self.doublets.iter()
    }
}

impl fmt::Display for DoubletPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.doublets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            d.fmt(f)?;
        }
        Ok(())
    }
}

/// Interleaves the binary representations of `p` and `q` into doublets.
///
/// Both numbers are rendered at width `max(bit_length(p), bit_length(q))`
/// and paired position-wise, most significant first.
pub fn shuffle_doublets(p: BasisIndex, q: BasisIndex) -> DoubletPath {
    let width = p.bit_length().max(q.bit_length());
    let doublets = (0..width)
        .rev()
        .map(|i| Doublet::new(p.bit(i), q.bit(i)))
        .collect();
    DoubletPath { doublets }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: u64) -> BasisIndex {
        BasisIndex::new(v)
    }

    #[test]
    fn bit_length_edges() {
        assert_eq!(bi(0).bit_length(), 0);
        assert_eq!(bi(1).bit_length(), 1);
        assert_eq!(bi(2).bit_length(), 2);
        assert_eq!(bi(3).bit_length(), 2);
        assert_eq!(bi(4).bit_length(), 3);
        assert_eq!(bi((1 << 62) + 5).bit_length(), 63);
        // 2^(N-1) <= p < 2^N for a few spot values
        for p in [1u64, 7, 8, 255, 256, 12345] {
            let n = bi(p).bit_length();
            assert!(1u64 << (n - 1) <= p && p < 1u64 << n);
        }
    }

    #[test]
    fn index_cap() {
        assert!(BasisIndex::try_new((1 << 63) - 1).is_some());
        assert!(BasisIndex::try_new(1 << 63).is_none());
        assert_eq!(BasisIndex::try_from(u64::MAX), Err(IndexOutOfRange(u64::MAX)));
    }

    #[test]
    fn xor_examples() {
        assert_eq!(xor_index(bi(5), bi(11)), bi(14));
        assert_eq!(xor_index(bi(25), bi(17)), bi(8));
        assert_eq!(xor_index(bi(42), bi(0)), bi(42));
        assert_eq!(xor_index(bi(42), bi(42)), bi(0));
    }

    #[test]
    fn variant_transpose_involution() {
        for v in ProductVariant::ALL {
            assert_eq!(v.transpose().transpose(), v);
            assert_ne!(v.transpose(), v);
            assert_eq!(v.interior_index(), v.transpose().interior_index());
        }
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("p3".parse::<ProductVariant>().unwrap(), ProductVariant::P3);
        assert_eq!("T1".parse::<ProductVariant>().unwrap(), ProductVariant::T1);
        assert_eq!("t0".parse::<ProductVariant>().unwrap(), ProductVariant::T0);
        assert!("P4".parse::<ProductVariant>().is_err());
        assert!("".parse::<ProductVariant>().is_err());
    }

    #[test]
    fn sign_algebra() {
        use Sign::{Minus, Plus};
        assert_eq!(Plus * Plus, Plus);
        assert_eq!(Plus * Minus, Minus);
        assert_eq!(Minus * Minus, Plus);
        assert_eq!(-Plus, Minus);
        assert_eq!(Plus.value(), 1);
        assert_eq!(Minus.value(), -1);
        assert_eq!(Plus.to_string(), "+1");
        assert_eq!(Minus.to_string(), "-1");
    }

    #[test]
    fn doublet_indexing() {
        assert_eq!(Doublet::from_bits(0, 0).index(), 0);
        assert_eq!(Doublet::from_bits(0, 1).index(), 1);
        assert_eq!(Doublet::from_bits(1, 0).index(), 2);
        assert_eq!(Doublet::from_bits(1, 1).index(), 3);
        assert_eq!(Doublet::from_bits(1, 0).to_string(), "10");
    }

    #[test]
    fn shuffle_known_paths() {
        // [3;1] = [11;01] = 10,11
        assert_eq!(shuffle_doublets(bi(3), bi(1)).to_string(), "10,11");
        // [26;42] = [011010;101010] = 01,10,11,00,11,00
        assert_eq!(
            shuffle_doublets(bi(26), bi(42)).to_string(),
            "01,10,11,00,11,00"
        );
        // [25;17] = [11001;10001] = 11,10,00,00,11
        assert_eq!(
            shuffle_doublets(bi(25), bi(17)).to_string(),
            "11,10,00,00,11"
        );
        assert!(shuffle_doublets(bi(0), bi(0)).is_empty());
    }

    #[test]
    fn shuffle_width_and_roundtrip() {
        for p in 0..64u64 {
            for q in 0..64u64 {
                let path = shuffle_doublets(bi(p), bi(q));
                assert_eq!(
                    path.len() as u32,
                    bi(p).bit_length().max(bi(q).bit_length())
                );
                assert_eq!(path.reconstruct(), (bi(p), bi(q)));
            }
        }
    }
}
