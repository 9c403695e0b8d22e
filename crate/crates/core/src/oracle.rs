//! Ground-truth multiplication: shuffle-basis vectors multiplied by the
//! literal doubling formulas of all eight products.
//!
//! An element of `C_N` is a dense array of `2^N` coefficients; the ordered
//! pair `(a, b)` is the shuffle `a0, b0, a1, b1, ...`, so splitting a vector
//! into its halves is a stride-2 view. Multiplication recurses on those views
//! down to plain real arithmetic, which makes this O(4^N) by construction:
//! deliberately naive, and the reference every faster path is tested against.

use crate::algebra::{xor_index, BasisIndex, ProductVariant, Sign};

/// Error for mixing vectors from different algebra levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("operands live in different algebras (levels {left} and {right})")]
pub struct LevelMismatch {
    pub left: u32,
    pub right: u32,
}

/// Error for constructing vectors from malformed coefficient data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VectorError {
    #[error("coefficient count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("basis index {index} does not fit in level {level}")]
    IndexBeyondLevel { index: u64, level: u32 },
}

/// A dense element of `C_N` in the shuffle basis.
#[derive(Clone, PartialEq, Debug)]
pub struct DenseVector {
    coefficients: Vec<f64>,
    level: u32,
}

impl DenseVector {
    /// The zero vector of `C_level`.
    pub fn zero(level: u32) -> Self {
        Self {
            coefficients: vec![0.0; 1usize << level],
            level,
        }
    }

    /// Wraps raw coefficients; the length must be a power of two.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self, VectorError> {
        let n = coefficients.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(VectorError::NotPowerOfTwo(n));
        }
        Ok(Self {
            coefficients,
            level: n.trailing_zeros(),
        })
    }

    /// The basis vector `e_index` embedded in `C_level`.
    pub fn basis(index: BasisIndex, level: u32) -> Result<Self, VectorError> {
        if index.bit_length() > level {
            return Err(VectorError::IndexBeyondLevel {
                index: index.value(),
                level,
            });
        }
        let mut v = Self::zero(level);
        v.coefficients[index.value() as usize] = 1.0;
        Ok(v)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> f64 {
        self.coefficients[i]
    }

    /// Splits into the pair `(a, b)` with `a` the even-indexed and `b` the
    /// odd-indexed coefficients, each one level down.
    pub fn deinterleave(&self) -> (DenseVector, DenseVector) {
        assert!(self.level > 0, "level-0 vectors have no halves");
        let take = |parity: usize| {
            let coefficients = self
                .coefficients
                .iter()
                .skip(parity)
                .step_by(2)
                .copied()
                .collect();
            DenseVector {
                coefficients,
                level: self.level - 1,
            }
        };
        (take(0), take(1))
    }

    /// Inverse of [`Self::deinterleave`].
    pub fn interleave(a: &DenseVector, b: &DenseVector) -> Result<DenseVector, LevelMismatch> {
        if a.level != b.level {
            return Err(LevelMismatch {
                left: a.level,
                right: b.level,
            });
        }
        let mut coefficients = Vec::with_capacity(a.len() * 2);
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            coefficients.push(*x);
            coefficients.push(*y);
        }
        Ok(DenseVector {
            coefficients,
            level: a.level + 1,
        })
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest absolute coefficient difference; panics on level mismatch.
    pub fn max_abs_diff(&self, other: &DenseVector) -> f64 {
        assert_eq!(self.level, other.level, "level mismatch");
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> DenseVector {
        DenseVector {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
            level: self.level,
        }
    }
}

impl std::ops::Add for &DenseVector {
    type Output = DenseVector;

    fn add(self, rhs: &DenseVector) -> DenseVector {
        assert_eq!(self.level, rhs.level, "level mismatch");
        DenseVector {
            coefficients: self
                .coefficients
                .iter()
                .zip(&rhs.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
            level: self.level,
        }
    }
}

impl std::ops::Sub for &DenseVector {
    type Output = DenseVector;

    fn sub(self, rhs: &DenseVector) -> DenseVector {
        assert_eq!(self.level, rhs.level, "level mismatch");
        DenseVector {
            coefficients: self
                .coefficients
                .iter()
                .zip(&rhs.coefficients)
                .map(|(a, b)| a - b)
                .collect(),
            level: self.level,
        }
    }
}

/// Conjugation: negates every coefficient except the real part at index 0.
///
/// This is the flat form of the recursive rule `(a, b)* = (a*, -b)` on the
/// shuffle halves; the two agree on every vector.
pub fn conjugate(x: &DenseVector) -> DenseVector {
    let mut coefficients = x.coefficients.clone();
    for c in coefficients.iter_mut().skip(1) {
        *c = -*c;
    }
    DenseVector {
        coefficients,
        level: x.level,
    }
}

/// A strided read view of one shuffle half, with lazy conjugation/negation.
///
/// `value = (-1)^negated * conj^conjugated * raw`, where the raw view is
/// `data[offset], data[offset + stride], ...`. Splitting applies
/// `(a, b)* = (a*, -b)`: the even half keeps the conjugation flag, the odd
/// half trades it for a negation.
#[derive(Clone, Copy)]
struct Operand<'a> {
    data: &'a [f64],
    offset: usize,
    stride: usize,
    len: usize,
    conjugated: bool,
    negated: bool,
}

impl<'a> Operand<'a> {
    fn whole(v: &'a DenseVector) -> Self {
        Self {
            data: &v.coefficients,
            offset: 0,
            stride: 1,
            len: v.coefficients.len(),
            conjugated: false,
            negated: false,
        }
    }

    fn halves(self) -> (Self, Self) {
        let half = self.len / 2;
        let a = Self {
            offset: self.offset,
            stride: self.stride * 2,
            len: half,
            ..self
        };
        let b = Self {
            offset: self.offset + self.stride,
            stride: self.stride * 2,
            len: half,
            conjugated: false,
            negated: self.negated ^ self.conjugated,
            ..self
        };
        (a, b)
    }

    fn conj(self) -> Self {
        Self {
            conjugated: !self.conjugated,
            ..self
        }
    }

    fn neg(self) -> Self {
        Self {
            negated: !self.negated,
            ..self
        }
    }

    /// Reads the single coefficient of a level-0 view.
    fn scalar(self) -> f64 {
        let v = self.data[self.offset];
        if self.negated {
            -v
        } else {
            v
        }
    }
}

/// Accumulates the product `x * y` into the strided output view.
///
/// Each recursion level applies the variant's doubling formula verbatim: the
/// four half-products accumulate into the even/odd halves of the output in a
/// fixed order, so results are reproducible bit for bit.
fn accumulate_product(
    out: &mut [f64],
    out_offset: usize,
    out_stride: usize,
    x: Operand<'_>,
    y: Operand<'_>,
    variant: ProductVariant,
) {
    if x.len == 1 {
        out[out_offset] += x.scalar() * y.scalar();
        return;
    }
    let (a, b) = x.halves();
    let (c, d) = y.halves();
    let even = out_offset;
    let odd = out_offset + out_stride;
    let stride = out_stride * 2;
    let mut put = |slot: usize, lhs: Operand<'_>, rhs: Operand<'_>| {
        accumulate_product(out, slot, stride, lhs, rhs, variant);
    };
    use ProductVariant::*;
    match variant {
        // (ca - b*d, da* + bc)
        P0 => {
            put(even, c, a);
            put(even, b.conj().neg(), d);
            put(odd, d, a.conj());
            put(odd, b, c);
        }
        // (ca - db*, a*d + cb)
        P1 => {
            put(even, c, a);
            put(even, d.neg(), b.conj());
            put(odd, a.conj(), d);
            put(odd, c, b);
        }
        // (ac - b*d, da* + bc)
        P2 => {
            put(even, a, c);
            put(even, b.conj().neg(), d);
            put(odd, d, a.conj());
            put(odd, b, c);
        }
        // (ac - db*, a*d + cb)
        P3 => {
            put(even, a, c);
            put(even, d.neg(), b.conj());
            put(odd, a.conj(), d);
            put(odd, c, b);
        }
        // (ca - bd*, ad + c*b)
        T0 => {
            put(even, c, a);
            put(even, b.neg(), d.conj());
            put(odd, a, d);
            put(odd, c.conj(), b);
        }
        // (ca - d*b, da + bc*)
        T1 => {
            put(even, c, a);
            put(even, d.conj().neg(), b);
            put(odd, d, a);
            put(odd, b, c.conj());
        }
        // (ac - bd*, ad + c*b)
        T2 => {
            put(even, a, c);
            put(even, b.neg(), d.conj());
            put(odd, a, d);
            put(odd, c.conj(), b);
        }
        // (ac - d*b, da + bc*)
        T3 => {
            put(even, a, c);
            put(even, d.conj().neg(), b);
            put(odd, d, a);
            put(odd, b, c.conj());
        }
    }
}

/// Multiplies two vectors of the same level by the variant's doubling formula.
///
/// Level 0 is plain real multiplication; above that the operands split into
/// shuffle halves and recurse. Bilinear in both arguments.
pub fn multiply(
    x: &DenseVector,
    y: &DenseVector,
    variant: ProductVariant,
) -> Result<DenseVector, LevelMismatch> {
    if x.level != y.level {
        return Err(LevelMismatch {
            left: x.level,
            right: y.level,
        });
    }
    let mut out = DenseVector::zero(x.level);
    accumulate_product(
        &mut out.coefficients,
        0,
        1,
        Operand::whole(x),
        Operand::whole(y),
        variant,
    );
    Ok(out)
}

/// Extracts `omega(p, q)` by actually multiplying basis vectors.
///
/// Builds `e_p` and `e_q` at the smallest containing level, multiplies them,
/// and demands the result be exactly `±e_{p XOR q}`; basis products involve
/// no rounding, every intermediate value is -1, 0, or 1. Anything else is an
/// implementation bug and panics.
pub fn oracle_twist(p: BasisIndex, q: BasisIndex, variant: ProductVariant) -> Sign {
    let level = p.bit_length().max(q.bit_length());
    let x = DenseVector::basis(p, level).expect("index fits its own bit length");
    let y = DenseVector::basis(q, level).expect("index fits its own bit length");
    let product = multiply(&x, &y, variant).expect("levels match by construction");

    let expected = xor_index(p, q).value() as usize;
    let mut sign = None;
    for (i, &c) in product.coefficients().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        assert!(
            i == expected && sign.is_none() && (c == 1.0 || c == -1.0),
            "malformed basis product e_{p} e_{q} under {variant}: coefficient {c} at {i}, expected ±1 at {expected}"
        );
        sign = Some(if c > 0.0 { Sign::Plus } else { Sign::Minus });
    }
    sign.unwrap_or_else(|| {
        panic!("malformed basis product e_{p} e_{q} under {variant}: all coefficients zero")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ProductVariant::*;
    use crate::automaton::twist;

    fn bi(v: u64) -> BasisIndex {
        BasisIndex::new(v)
    }

    fn e(index: u64, level: u32) -> DenseVector {
        DenseVector::basis(bi(index), level).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            DenseVector::from_coefficients(vec![1.0, 2.0, 3.0]),
            Err(VectorError::NotPowerOfTwo(3))
        );
        assert_eq!(
            DenseVector::from_coefficients(vec![]),
            Err(VectorError::NotPowerOfTwo(0))
        );
        assert!(DenseVector::basis(bi(4), 2).is_err());
        assert!(DenseVector::basis(bi(3), 2).is_ok());
    }

    #[test]
    fn interleave_roundtrip() {
        let v = DenseVector::from_coefficients((0..16).map(f64::from).collect()).unwrap();
        let (a, b) = v.deinterleave();
        assert_eq!(a.coefficients(), &[0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0]);
        assert_eq!(DenseVector::interleave(&a, &b).unwrap(), v);
    }

    #[test]
    fn conjugate_fixed_points_and_involution() {
        assert_eq!(conjugate(&e(0, 3)), e(0, 3));
        for k in 1..8 {
            assert_eq!(conjugate(&e(k, 3)), e(k, 3).scaled(-1.0));
        }
        let x = DenseVector::from_coefficients(vec![1.5, -2.0, 0.25, 3.0]).unwrap();
        assert_eq!(conjugate(&conjugate(&x)), x);
        // x + x* is real: only index 0 survives.
        let sum = &x + &conjugate(&x);
        assert_eq!(sum.coefficients(), &[3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn conjugate_matches_recursive_rule() {
        // Independent recursive evaluation of (a, b)* = (a*, -b).
        fn conj_rec(x: &DenseVector) -> DenseVector {
            if x.level() == 0 {
                return x.clone();
            }
            let (a, b) = x.deinterleave();
            DenseVector::interleave(&conj_rec(&a), &b.scaled(-1.0)).unwrap()
        }
        let x = DenseVector::from_coefficients((0..32).map(|i| f64::from(i) - 9.5).collect())
            .unwrap();
        assert_eq!(conjugate(&x), conj_rec(&x));
    }

    #[test]
    fn multiply_worked_examples() {
        let prod = multiply(&e(3, 2), &e(1, 2), P0).unwrap();
        assert_eq!(prod, e(2, 2));

        let prod = multiply(&e(25, 5), &e(17, 5), P3).unwrap();
        assert_eq!(prod, e(8, 5));

        let prod = multiply(&e(5, 3), &e(2, 3), P0).unwrap();
        assert_eq!(prod, e(7, 3).scaled(-1.0));
    }

    #[test]
    fn unit_is_identity() {
        let x = DenseVector::from_coefficients((0..8).map(|i| 0.5 * f64::from(i) - 1.0).collect())
            .unwrap();
        for v in ProductVariant::ALL {
            assert_eq!(multiply(&e(0, 3), &x, v).unwrap(), x);
            assert_eq!(multiply(&x, &e(0, 3), v).unwrap(), x);
        }
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let err = multiply(&e(1, 2), &e(1, 3), P0).unwrap_err();
        assert_eq!(err, LevelMismatch { left: 2, right: 3 });
    }

    #[test]
    fn oracle_twist_examples() {
        assert_eq!(oracle_twist(bi(3), bi(1), P0), Sign::Plus);
        assert_eq!(oracle_twist(bi(25), bi(17), P3), Sign::Plus);
        assert_eq!(oracle_twist(bi(5), bi(2), P0), Sign::Minus);
        assert_eq!(oracle_twist(bi(5), bi(2), P1), Sign::Plus);
        assert_eq!(oracle_twist(bi(0), bi(0), P2), Sign::Plus);
    }

    #[test]
    fn oracle_agrees_with_automaton_on_small_block() {
        for p in 0..32u64 {
            for q in 0..32u64 {
                for v in ProductVariant::ALL {
                    assert_eq!(
                        oracle_twist(bi(p), bi(q), v),
                        twist(bi(p), bi(q), v),
                        "mismatch at ({p}, {q}) under {v}"
                    );
                }
            }
        }
    }

    #[test]
    fn basis_transpose_identity_spot() {
        for (p, q) in [(3u64, 1u64), (25, 17), (5, 2), (12, 33), (63, 40)] {
            for v in ProductVariant::PRIMAL {
                assert_eq!(
                    oracle_twist(bi(q), bi(p), v.transpose()),
                    oracle_twist(bi(p), bi(q), v)
                );
            }
        }
    }

    #[test]
    fn bilinearity_spot() {
        let x = DenseVector::from_coefficients(vec![0.5, -1.0, 2.0, 0.25, -0.125, 1.5, 0.0, 3.0])
            .unwrap();
        let y = DenseVector::from_coefficients(vec![1.0, 0.5, -0.5, 2.0, 1.25, -2.0, 0.75, 0.0])
            .unwrap();
        let z = DenseVector::from_coefficients(vec![-1.0, 2.0, 0.5, 0.0, 1.0, 0.5, -0.25, 1.0])
            .unwrap();
        for v in ProductVariant::ALL {
            let lhs = multiply(&x, &(&y + &z), v).unwrap();
            let rhs = &multiply(&x, &y, v).unwrap() + &multiply(&x, &z, v).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}
