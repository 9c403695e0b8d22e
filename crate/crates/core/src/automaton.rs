//! Twist evaluation by a five-state signed automaton.
//!
//! The infinite twist trees are self-similar, so navigating them never needs
//! a materialized tree: the current node is fully described by one of five
//! labels plus an accumulated sign, and each doublet of `[p;q]` drives one
//! transition. Interior nodes are the only place the four primal products
//! differ, so they get one sign row per product index.

use crate::algebra::{
    shuffle_doublets, xor_index, BasisIndex, Doublet, ProductVariant, Sign,
};

/// Node label of the twist automaton.
///
/// The labels name regions of the basis product table: corner, top edge,
/// left edge, diagonal, and interior.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum NodeLabel {
    Corner,
    Top,
    Left,
    Diagonal,
    Interior,
}

impl NodeLabel {
    pub const fn letter(self) -> char {
        match self {
            Self::Corner => 'C',
            Self::Top => 'T',
            Self::Left => 'L',
            Self::Diagonal => 'D',
            Self::Interior => 'I',
        }
    }

    /// Row index into the outer transition table; interior nodes have none.
    const fn outer_row(self) -> Option<usize> {
        match self {
            Self::Corner => Some(0),
            Self::Top => Some(1),
            Self::Left => Some(2),
            Self::Diagonal => Some(3),
            Self::Interior => None,
        }
    }
}

impl std::fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Automaton state: a node label plus the sign accumulated on the way there.
///
/// Every walk starts at `(C, +1)`; once the label reaches `I` it stays `I`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TwistState {
    pub label: NodeLabel,
    pub sign: Sign,
}

impl TwistState {
    pub const START: Self = Self {
        label: NodeLabel::Corner,
        sign: Sign::Plus,
    };
}

impl std::fmt::Display for TwistState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefix = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{}{}", prefix, self.label)
    }
}

/// Error for stepping the automaton with a transpose product.
///
/// Transpose products are evaluated by swapping the arguments at the basis
/// level, not by walking a separate tree, so single steps only accept
/// `P0`..`P3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("automaton steps are defined for P0-P3 only (got {0})")]
pub struct TransposeStep(pub ProductVariant);

type OuterEntry = (NodeLabel, Sign);

const PLUS: Sign = Sign::Plus;
const MINUS: Sign = Sign::Minus;

/// The transition tables of the twist automaton.
///
/// `outer` drives states labeled C, T, L, D; each entry is the next label and
/// a sign multiplier, with subtree signs tracked multiplicatively. `interior`
/// holds one sign row per product index, consumed once the label is I.
///
/// Rows are indexed by doublet in `00, 01, 10, 11` order:
///
/// | from | 00 | 01 | 10 | 11 |
/// |------|----|----|----|----|
/// | C    | +C | +T | +L | -D |
/// | T    | +T | +T | +I | -I |
/// | L    | +L | -I | +L | +I |
/// | D    | +D | -I | +I | +D |
///
/// | k | 00 | 01 | 10 | 11 |
/// |---|----|----|----|----|
/// | 0 | -1 | +1 | +1 | +1 |
/// | 1 | -1 | -1 | -1 | -1 |
/// | 2 | +1 | +1 | +1 | +1 |
/// | 3 | +1 | -1 | -1 | -1 |
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TransitionTable {
    outer: [[OuterEntry; 4]; 4],
    interior: [[Sign; 4]; 4],
}

const STANDARD: TransitionTable = TransitionTable {
    outer: [
        // C
        [
            (NodeLabel::Corner, PLUS),
            (NodeLabel::Top, PLUS),
            (NodeLabel::Left, PLUS),
            (NodeLabel::Diagonal, MINUS),
        ],
        // T
        [
            (NodeLabel::Top, PLUS),
            (NodeLabel::Top, PLUS),
            (NodeLabel::Interior, PLUS),
            (NodeLabel::Interior, MINUS),
        ],
        // L
        [
            (NodeLabel::Left, PLUS),
            (NodeLabel::Interior, MINUS),
            (NodeLabel::Left, PLUS),
            (NodeLabel::Interior, PLUS),
        ],
        // D
        [
            (NodeLabel::Diagonal, PLUS),
            (NodeLabel::Interior, MINUS),
            (NodeLabel::Interior, PLUS),
            (NodeLabel::Diagonal, PLUS),
        ],
    ],
    interior: [
        [MINUS, PLUS, PLUS, PLUS],
        [MINUS, MINUS, MINUS, MINUS],
        [PLUS, PLUS, PLUS, PLUS],
        [PLUS, MINUS, MINUS, MINUS],
    ],
};

impl TransitionTable {
    /// The table distilled from the twist trees; what [`twist`] uses.
    pub const fn standard() -> &'static Self {
        &STANDARD
    }

    /// Copy of this table with one interior row replaced.
    ///
    /// Useful for experiments and for demonstrating that verification
    /// harnesses actually detect wrong tables.
    pub fn with_interior_row(mut self, k: usize, row: [Sign; 4]) -> Self {
        self.interior[k] = row;
        self
    }

    pub fn outer_entry(&self, label: NodeLabel, d: Doublet) -> Option<OuterEntry> {
        label.outer_row().map(|row| self.outer[row][d.index()])
    }

    pub fn interior_entry(&self, k: usize, d: Doublet) -> Sign {
        self.interior[k][d.index()]
    }

    /// One transition for the product with interior index `k`.
    pub fn apply(&self, state: TwistState, d: Doublet, k: usize) -> TwistState {
        match state.label.outer_row() {
            Some(row) => {
                let (label, multiplier) = self.outer[row][d.index()];
                TwistState {
                    label,
                    sign: state.sign * multiplier,
                }
            }
            None => TwistState {
                label: NodeLabel::Interior,
                sign: state.sign * self.interior[k][d.index()],
            },
        }
    }

    /// Walks a doublet sequence from the start state under a primal product.
    pub fn walk_doublets<I>(&self, doublets: I, k: usize) -> TwistState
    where
        I: IntoIterator<Item = Doublet>,
    {
        doublets
            .into_iter()
            .fold(TwistState::START, |state, d| self.apply(state, d, k))
    }

    /// Twist of `(p, q)` under this table; transposes swap their arguments.
    pub fn walk(&self, p: BasisIndex, q: BasisIndex, variant: ProductVariant) -> Sign {
        let (p, q) = if variant.is_transpose() { (q, p) } else { (p, q) };
        let k = variant.interior_index();
        let width = p.bit_length().max(q.bit_length());
        let mut state = TwistState::START;
        for i in (0..width).rev() {
            state = self.apply(state, Doublet::new(p.bit(i), q.bit(i)), k);
        }
        state.sign
    }
}

/// Applies one doublet to an automaton state.
///
/// Rejects transpose products: those never walk the tree directly, they are
/// defined by the swapped-argument walk of their primal partner.
pub fn step(
    state: TwistState,
    d: Doublet,
    variant: ProductVariant,
) -> Result<TwistState, TransposeStep> {
    if variant.is_transpose() {
        return Err(TransposeStep(variant));
    }
    Ok(STANDARD.apply(state, d, variant.interior_index()))
}

/// The twist `omega(p, q)`: the sign in `e_p e_q = omega(p, q) e_{p XOR q}`.
///
/// Primal products fold [`step`] over [`shuffle_doublets`]`(p, q)` starting
/// from `(C, +1)`; transpose products return `twist(q, p)` of the primal
/// partner, which reproduces their transposed basis table. Total over all
/// index pairs.
pub fn twist(p: BasisIndex, q: BasisIndex, variant: ProductVariant) -> Sign {
    STANDARD.walk(p, q, variant)
}

/// The full basis product: `e_p e_q = (sign, index)` under `variant`.
pub fn basis_product(
    p: BasisIndex,
    q: BasisIndex,
    variant: ProductVariant,
) -> (Sign, BasisIndex) {
    (twist(p, q, variant), xor_index(p, q))
}

/// Every state visited while evaluating `twist(p, q, variant)`, paired with
/// the doublet that was navigated and starting with the pair actually walked
/// (transposes swap). Drives trace output; the final state's sign is the twist.
pub fn walk_states(
    p: BasisIndex,
    q: BasisIndex,
    variant: ProductVariant,
) -> (BasisIndex, BasisIndex, Vec<(Doublet, TwistState)>) {
    let (p, q) = if variant.is_transpose() { (q, p) } else { (p, q) };
    let k = variant.interior_index();
    let mut state = TwistState::START;
    let steps = shuffle_doublets(p, q)
        .iter()
        .map(|&d| {
            state = STANDARD.apply(state, d, k);
            (d, state)
        })
        .collect();
    (p, q, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ProductVariant::*;

    fn bi(v: u64) -> BasisIndex {
        BasisIndex::new(v)
    }

    fn d(p: u8, q: u8) -> Doublet {
        Doublet::from_bits(p, q)
    }

    #[test]
    fn step_examples() {
        let s = |label, sign| TwistState { label, sign };
        use NodeLabel::*;
        assert_eq!(
            step(TwistState::START, d(1, 1), P3).unwrap(),
            s(Diagonal, Sign::Minus)
        );
        assert_eq!(
            step(s(Diagonal, Sign::Minus), d(1, 0), P3).unwrap(),
            s(Interior, Sign::Minus)
        );
        assert_eq!(
            step(s(Interior, Sign::Minus), d(1, 1), P3).unwrap(),
            s(Interior, Sign::Plus)
        );
        assert_eq!(step(TwistState::START, d(0, 0), P0).unwrap(), TwistState::START);
    }

    #[test]
    fn step_rejects_transposes() {
        for v in [T0, T1, T2, T3] {
            assert_eq!(step(TwistState::START, d(0, 0), v), Err(TransposeStep(v)));
        }
    }

    #[test]
    fn interior_is_absorbing() {
        for k in 0..4 {
            for a in [0u8, 1] {
                for b in [0u8, 1] {
                    let state = TwistState {
                        label: NodeLabel::Interior,
                        sign: Sign::Plus,
                    };
                    let next = STANDARD.apply(state, d(a, b), k);
                    assert_eq!(next.label, NodeLabel::Interior);
                }
            }
        }
    }

    #[test]
    fn twist_worked_examples() {
        for v in ProductVariant::PRIMAL {
            assert_eq!(twist(bi(3), bi(1), v), Sign::Plus);
        }
        assert_eq!(twist(bi(25), bi(17), P3), Sign::Plus);
        // The products disagree at (5, 2): interior rows differ.
        assert_eq!(twist(bi(5), bi(2), P0), Sign::Minus);
        assert_eq!(twist(bi(5), bi(2), P1), Sign::Plus);
        assert_eq!(twist(bi(5), bi(2), P2), Sign::Minus);
        assert_eq!(twist(bi(5), bi(2), P3), Sign::Plus);
    }

    #[test]
    fn twist_unit_and_self_pairs() {
        for v in ProductVariant::ALL {
            for p in 0..40u64 {
                assert_eq!(twist(bi(p), bi(0), v), Sign::Plus);
                assert_eq!(twist(bi(0), bi(p), v), Sign::Plus);
                if p > 0 {
                    assert_eq!(twist(bi(p), bi(p), v), Sign::Minus);
                }
            }
        }
    }

    /// The sixteen leaves of the quaternion twist tree, left to right; the
    /// leaf for `(p, q)` sits at index `p1 q1 p0 q0`.
    const QUATERNION_LEAVES: [i8; 16] = [
        1, 1, 1, -1, 1, 1, 1, -1, 1, -1, 1, 1, -1, 1, -1, -1,
    ];

    #[test]
    fn quaternion_restriction() {
        for p in 0u64..4 {
            for q in 0u64..4 {
                let leaf = |a: u64, b: u64| {
                    let idx = ((a >> 1) << 3) | ((b >> 1) << 2) | ((a & 1) << 1) | (b & 1);
                    QUATERNION_LEAVES[idx as usize]
                };
                for v in ProductVariant::PRIMAL {
                    assert_eq!(twist(bi(p), bi(q), v).value(), leaf(p, q));
                }
                // Transposes read the mirrored leaf.
                for v in [T0, T1, T2, T3] {
                    assert_eq!(twist(bi(p), bi(q), v).value(), leaf(q, p));
                }
            }
        }
    }

    #[test]
    fn transpose_relation_small() {
        for p in 0..64u64 {
            for q in 0..64u64 {
                for pv in ProductVariant::PRIMAL {
                    assert_eq!(
                        twist(bi(p), bi(q), pv.transpose()),
                        twist(bi(q), bi(p), pv)
                    );
                }
            }
        }
    }

    #[test]
    fn basis_product_examples() {
        assert_eq!(basis_product(bi(3), bi(1), P0), (Sign::Plus, bi(2)));
        assert_eq!(basis_product(bi(25), bi(17), P3), (Sign::Plus, bi(8)));
        assert_eq!(basis_product(bi(7), bi(7), P2), (Sign::Minus, bi(0)));
    }

    #[test]
    fn walk_matches_explicit_fold() {
        for p in 0..32u64 {
            for q in 0..32u64 {
                for v in ProductVariant::PRIMAL {
                    let folded = shuffle_doublets(bi(p), bi(q))
                        .iter()
                        .try_fold(TwistState::START, |s, &dd| step(s, dd, v))
                        .unwrap();
                    assert_eq!(folded.sign, twist(bi(p), bi(q), v));
                }
            }
        }
    }

    #[test]
    fn padding_does_not_move_the_start() {
        for p in 0..48u64 {
            for q in 0..48u64 {
                for v in ProductVariant::PRIMAL {
                    let width = bi(p).bit_length().max(bi(q).bit_length()) + 7;
                    let padded = (0..width)
                        .rev()
                        .map(|i| Doublet::new(bi(p).bit(i), bi(q).bit(i)));
                    let state = STANDARD.walk_doublets(padded, v.interior_index());
                    assert_eq!(state.sign, twist(bi(p), bi(q), v));
                }
            }
        }
    }

    #[test]
    fn walk_states_traces_transposes_swapped() {
        let (wp, wq, steps) = walk_states(bi(25), bi(17), T3);
        assert_eq!((wq, wp), (bi(25), bi(17)));
        assert_eq!(steps.len(), 5);
        let (wp, wq, steps) = walk_states(bi(25), bi(17), P3);
        assert_eq!((wp, wq), (bi(25), bi(17)));
        assert_eq!(steps.last().unwrap().1.sign, Sign::Plus);
    }
}
