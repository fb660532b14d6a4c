//! Registry of Type I irreducible dual pairs and their shapes.
//!
//! A pair is stored as its two members in a fixed order (the "slots"), plus a
//! flag saying which slot is the smaller member `G`. Everything downstream that
//! depends on the concrete matrix model keys off the slot, never off `G`/`G'`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairError {
    #[error("cannot parse pair literal: {0}")]
    Parse(String),
    #[error("invalid pair: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// `(Sp(2n,R), O(p,q))`
    R,
    /// `(U(n1,n2), U(p,q))`
    C,
    /// `(O*(2n), Sp(p,q))`
    H,
    /// `(Sp(2n,C), O(p,C))`
    CxSpO,
}

/// Position of a member inside the pair literal order of its case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    First,
    Second,
}

impl Slot {
    pub fn other(self) -> Slot {
        match self {
            Slot::First => Slot::Second,
            Slot::Second => Slot::First,
        }
    }
}

/// `G` is the smaller member, `GPrime` the larger one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    G,
    GPrime,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::G => Side::GPrime,
            Side::GPrime => Side::G,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::G => "G",
            Side::GPrime => "G'",
        })
    }
}

/// One member of a pair together with its size parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Member {
    Sp2nR { n: usize },
    Opq { p: usize, q: usize },
    /// `U(a,b)`; in the first slot the parameters are called `n1,n2`.
    U { a: usize, b: usize },
    OStar { n: usize },
    Sppq { p: usize, q: usize },
    Sp2nC { n: usize },
    OC { p: usize },
}

/// The invariant form carried by the defining module, in the shape used by
/// the signed-diagram rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `V+` and `V-` are orthogonal for the form.
    Orth,
    /// The form pairs `V+` with `V-`.
    Paired,
    /// Hermitian case: no bilinear form survives complexification.
    Free,
    /// Complex group: a single space with no grading.
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormKind {
    /// `+1` symmetric, `-1` skew.
    pub eps: i8,
    pub layout: Layout,
}

/// A simple factor of `K_C`, acting on a block of the defining module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    GL(usize),
    /// `Sp(2a)`; the payload is `a`.
    Sp(usize),
    O(usize),
}

impl FactorKind {
    pub fn dim(self) -> usize {
        match self {
            FactorKind::GL(a) => a * a,
            FactorKind::Sp(a) => a * (2 * a + 1),
            FactorKind::O(a) => a * a.saturating_sub(1) / 2,
        }
    }

    /// Size of the defining representation.
    pub fn size(self) -> usize {
        match self {
            FactorKind::GL(a) | FactorKind::O(a) => a,
            FactorKind::Sp(a) => 2 * a,
        }
    }

    pub fn rank(self) -> usize {
        match self {
            FactorKind::GL(a) | FactorKind::Sp(a) => a,
            FactorKind::O(a) => a / 2,
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::GL(a) => write!(f, "GL({a})"),
            FactorKind::Sp(a) => write!(f, "Sp({})", 2 * a),
            FactorKind::O(a) => write!(f, "O({a})"),
        }
    }
}

/// How a factor sits inside the operators on `V = V+ (+) V-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Acts on coordinates `offset..offset+size` and trivially elsewhere.
    Block { offset: usize },
    /// `GL(n)` acting by `Z` on `V+` and by `-Z^T` on `V- = (V+)^*`.
    Contragredient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub kind: FactorKind,
    pub placement: Placement,
}

/// Shape of one block of a point of `p*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    Sym(usize),
    Alt(usize),
    Full(usize, usize),
}

impl BlockKind {
    pub fn dim(self) -> usize {
        match self {
            BlockKind::Sym(n) => n * (n + 1) / 2,
            BlockKind::Alt(n) => n * n.saturating_sub(1) / 2,
            BlockKind::Full(r, c) => r * c,
        }
    }

    pub fn matrix_shape(self) -> (usize, usize) {
        match self {
            BlockKind::Sym(n) | BlockKind::Alt(n) => (n, n),
            BlockKind::Full(r, c) => (r, c),
        }
    }
}

impl Member {
    /// `(dim V+, dim V-)`; complex members report `(size, 0)`.
    pub fn signature(self) -> (usize, usize) {
        match self {
            Member::Sp2nR { n } | Member::OStar { n } => (n, n),
            Member::Opq { p, q } => (p, q),
            Member::U { a, b } => (a, b),
            Member::Sppq { p, q } => (2 * p, 2 * q),
            Member::Sp2nC { n } => (2 * n, 0),
            Member::OC { p } => (p, 0),
        }
    }

    pub fn size(self) -> usize {
        let (a, b) = self.signature();
        a + b
    }

    pub fn is_complex(self) -> bool {
        matches!(self, Member::Sp2nC { .. } | Member::OC { .. })
    }

    pub fn form(self) -> FormKind {
        let (eps, layout) = match self {
            Member::Sp2nR { .. } => (-1, Layout::Paired),
            Member::Opq { .. } => (1, Layout::Orth),
            Member::U { .. } => (1, Layout::Free),
            Member::OStar { .. } => (1, Layout::Paired),
            Member::Sppq { .. } => (-1, Layout::Orth),
            Member::Sp2nC { .. } => (-1, Layout::Single),
            Member::OC { .. } => (1, Layout::Single),
        };
        FormKind { eps, layout }
    }

    pub fn factors(self) -> Vec<Factor> {
        let blk = |kind, offset| Factor { kind, placement: Placement::Block { offset } };
        match self {
            Member::Sp2nR { n } | Member::OStar { n } => {
                vec![Factor { kind: FactorKind::GL(n), placement: Placement::Contragredient }]
            }
            Member::Opq { p, q } => vec![blk(FactorKind::O(p), 0), blk(FactorKind::O(q), p)],
            Member::U { a, b } => vec![blk(FactorKind::GL(a), 0), blk(FactorKind::GL(b), a)],
            Member::Sppq { p, q } => vec![blk(FactorKind::Sp(p), 0), blk(FactorKind::Sp(q), 2 * p)],
            Member::Sp2nC { n } => vec![blk(FactorKind::Sp(n), 0)],
            Member::OC { p } => vec![blk(FactorKind::O(p), 0)],
        }
    }

    pub fn dim_k(self) -> usize {
        self.factors().iter().map(|f| f.kind.dim()).sum()
    }

    pub fn p_blocks(self) -> Vec<BlockKind> {
        match self {
            Member::Sp2nR { n } => vec![BlockKind::Sym(n), BlockKind::Sym(n)],
            Member::Opq { p, q } => vec![BlockKind::Full(p, q)],
            Member::U { a, b } => vec![BlockKind::Full(a, b), BlockKind::Full(b, a)],
            Member::OStar { n } => vec![BlockKind::Alt(n), BlockKind::Alt(n)],
            Member::Sppq { p, q } => vec![BlockKind::Full(2 * p, 2 * q)],
            Member::Sp2nC { n } => vec![BlockKind::Sym(2 * n)],
            Member::OC { p } => vec![BlockKind::Alt(p)],
        }
    }

    pub fn dim_p(self) -> usize {
        self.p_blocks().iter().map(|b| b.dim()).sum()
    }

    fn token(self, slot: Slot) -> String {
        match self {
            Member::Sp2nR { n } => format!("sp2n_r:n={n}"),
            Member::Opq { p, q } => format!("o_pq:p={p},q={q}"),
            Member::U { a, b } => match slot {
                Slot::First => format!("u:n1={a},n2={b}"),
                Slot::Second => format!("u:p={a},q={b}"),
            },
            Member::OStar { n } => format!("ostar:n={n}"),
            Member::Sppq { p, q } => format!("sp_pq:p={p},q={q}"),
            Member::Sp2nC { n } => format!("sp2n_c:n={n}"),
            Member::OC { p } => format!("o_c:p={p}"),
        }
    }

    /// Conventional group name, e.g. `Sp(2,R)` or `O(2,2)`.
    pub fn group_name(self) -> String {
        match self {
            Member::Sp2nR { n } => format!("Sp({},R)", 2 * n),
            Member::Opq { p, q } => format!("O({p},{q})"),
            Member::U { a, b } => format!("U({a},{b})"),
            Member::OStar { n } => format!("O*({})", 2 * n),
            Member::Sppq { p, q } => format!("Sp({p},{q})"),
            Member::Sp2nC { n } => format!("Sp({},C)", 2 * n),
            Member::OC { p } => format!("O({p},C)"),
        }
    }
}

/// Block shape of `W`, as `(name, rows, cols)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WBlock {
    pub name: char,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shapes {
    pub dim_w: usize,
    pub dim_p: usize,
    pub dim_pprime: usize,
    pub dim_k: usize,
    pub dim_kprime: usize,
    pub w_blocks: Vec<WBlock>,
    pub p_blocks: Vec<BlockKind>,
    pub pprime_blocks: Vec<BlockKind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualPairSpec {
    pub case: Case,
    first: Member,
    second: Member,
    /// Slot holding the smaller member `G`.
    pub smaller: Slot,
}

impl DualPairSpec {
    pub fn new(first: Member, second: Member, smaller: Slot) -> Result<Self, PairError> {
        let case = match (first, second) {
            (Member::Sp2nR { .. }, Member::Opq { .. }) => Case::R,
            (Member::U { .. }, Member::U { .. }) => Case::C,
            (Member::OStar { .. }, Member::Sppq { .. }) => Case::H,
            (Member::Sp2nC { .. }, Member::OC { .. }) => Case::CxSpO,
            _ => {
                return Err(PairError::Invalid(format!(
                    "{} and {} do not form a Type I pair",
                    first.group_name(),
                    second.group_name()
                )))
            }
        };
        Ok(DualPairSpec { case, first, second, smaller })
    }

    pub fn r(n: usize, p: usize, q: usize, smaller: Slot) -> Self {
        Self::new(Member::Sp2nR { n }, Member::Opq { p, q }, smaller).expect("case R")
    }

    pub fn c(n1: usize, n2: usize, p: usize, q: usize, smaller: Slot) -> Self {
        Self::new(Member::U { a: n1, b: n2 }, Member::U { a: p, b: q }, smaller).expect("case C")
    }

    pub fn h(n: usize, p: usize, q: usize, smaller: Slot) -> Self {
        Self::new(Member::OStar { n }, Member::Sppq { p, q }, smaller).expect("case H")
    }

    pub fn cx(n: usize, p: usize, smaller: Slot) -> Self {
        Self::new(Member::Sp2nC { n }, Member::OC { p }, smaller).expect("complex case")
    }

    pub fn member(&self, slot: Slot) -> Member {
        match slot {
            Slot::First => self.first,
            Slot::Second => self.second,
        }
    }

    pub fn slot_of(&self, side: Side) -> Slot {
        match side {
            Side::G => self.smaller,
            Side::GPrime => self.smaller.other(),
        }
    }

    pub fn side_of(&self, slot: Slot) -> Side {
        if slot == self.smaller {
            Side::G
        } else {
            Side::GPrime
        }
    }

    pub fn side_member(&self, side: Side) -> Member {
        self.member(self.slot_of(side))
    }

    /// The size parameters in the order `(n, p, q)` or `(n1, n2, p, q)`.
    pub fn params(&self) -> Vec<usize> {
        match (self.first, self.second) {
            (Member::Sp2nR { n }, Member::Opq { p, q }) | (Member::OStar { n }, Member::Sppq { p, q }) => {
                vec![n, p, q]
            }
            (Member::U { a, b }, Member::U { a: p, b: q }) => vec![a, b, p, q],
            (Member::Sp2nC { n }, Member::OC { p }) => vec![n, p],
            _ => unreachable!("validated in new"),
        }
    }

    /// Last-column inequality of the stable-range table for the declared smaller member.
    pub fn stable_range(&self) -> bool {
        let v = self.params();
        match (self.case, self.smaller) {
            (Case::R, Slot::First) => 2 * v[0] <= v[1] && 2 * v[0] <= v[2],
            (Case::R, Slot::Second) => v[1] + v[2] <= v[0],
            (Case::C, Slot::First) => v[0] + v[1] <= v[2] && v[0] + v[1] <= v[3],
            (Case::C, Slot::Second) => v[2] + v[3] <= v[0] && v[2] + v[3] <= v[1],
            (Case::H, Slot::First) => v[0] <= v[1] && v[0] <= v[2],
            (Case::H, Slot::Second) => 2 * (v[1] + v[2]) <= v[0],
            (Case::CxSpO, Slot::First) => 4 * v[0] <= v[1],
            (Case::CxSpO, Slot::Second) => v[1] <= v[0],
        }
    }

    /// The pair `(Sp(2n,R), O(2n,2n))` together with a one-dimensional `rho`.
    pub fn excluded_dagger(&self, rho_is_one_dimensional: bool) -> bool {
        if !rho_is_one_dimensional || self.case != Case::R || self.smaller != Slot::First {
            return false;
        }
        let v = self.params();
        v[1] == 2 * v[0] && v[2] == 2 * v[0]
    }

    /// Pairs whose null-fibre boundary has codimension one.
    pub fn excluded_ddagger(&self) -> bool {
        let v = self.params();
        match (self.case, self.smaller) {
            (Case::R, Slot::First) => v[1] == 2 * v[0] || v[2] == 2 * v[0],
            (Case::CxSpO, Slot::First) => v[1] == 4 * v[0],
            _ => false,
        }
    }

    pub fn w_blocks(&self) -> Vec<WBlock> {
        let b = |name, rows, cols| WBlock { name, rows, cols };
        let v = self.params();
        match self.case {
            Case::R => vec![b('A', v[1], v[0]), b('B', v[2], v[0])],
            Case::C => vec![b('A', v[2], v[0]), b('B', v[2], v[1]), b('C', v[3], v[0]), b('D', v[3], v[1])],
            Case::H => vec![b('A', 2 * v[1], v[0]), b('B', 2 * v[2], v[0])],
            Case::CxSpO => vec![b('A', v[1], 2 * v[0])],
        }
    }

    pub fn dim_w(&self) -> usize {
        self.w_blocks().iter().map(|b| b.rows * b.cols).sum()
    }

    pub fn shapes(&self) -> Shapes {
        let g = self.side_member(Side::G);
        let gp = self.side_member(Side::GPrime);
        Shapes {
            dim_w: self.dim_w(),
            dim_p: g.dim_p(),
            dim_pprime: gp.dim_p(),
            dim_k: g.dim_k(),
            dim_kprime: gp.dim_k(),
            w_blocks: self.w_blocks(),
            p_blocks: g.p_blocks(),
            pprime_blocks: gp.p_blocks(),
        }
    }
}

impl fmt::Display for DualPairSpec {
    /// The smaller member is written first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.slot_of(Side::G);
        let gp = g.other();
        write!(f, "{}/{}", self.member(g).token(g), self.member(gp).token(gp))
    }
}

fn parse_member(tok: &str) -> Result<(Member, Option<Slot>), PairError> {
    let err = |m: &str| PairError::Parse(format!("{tok:?}: {m}"));
    let (name, rest) = tok.split_once(':').ok_or_else(|| err("expected name:key=value"))?;
    let mut kv = std::collections::BTreeMap::new();
    for part in rest.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| err("expected key=value"))?;
        let v: usize = v.trim().parse().map_err(|_| err("parameter must be a nonnegative integer"))?;
        if kv.insert(k.trim().to_string(), v).is_some() {
            return Err(err("duplicate key"));
        }
    }
    let has_n1 = kv.contains_key("n1");
    let has_p = kv.contains_key("p");
    let mut take = |k: &str| kv.remove(k).ok_or_else(|| err(&format!("missing key {k}")));
    let out = match name.trim() {
        "sp2n_r" => (Member::Sp2nR { n: take("n")? }, Some(Slot::First)),
        "o_pq" => (Member::Opq { p: take("p")?, q: take("q")? }, Some(Slot::Second)),
        "ostar" => (Member::OStar { n: take("n")? }, Some(Slot::First)),
        "sp_pq" => (Member::Sppq { p: take("p")?, q: take("q")? }, Some(Slot::Second)),
        "sp2n_c" => (Member::Sp2nC { n: take("n")? }, Some(Slot::First)),
        "o_c" => (Member::OC { p: take("p")? }, Some(Slot::Second)),
        "u" => {
            if has_n1 {
                (Member::U { a: take("n1")?, b: take("n2")? }, Some(Slot::First))
            } else if has_p {
                (Member::U { a: take("p")?, b: take("q")? }, Some(Slot::Second))
            } else {
                return Err(err("u needs n1,n2 or p,q"));
            }
        }
        other => return Err(err(&format!("unknown member {other:?}"))),
    };
    if let Some(k) = kv.keys().next() {
        return Err(err(&format!("unexpected key {k}")));
    }
    Ok(out)
}

impl FromStr for DualPairSpec {
    type Err = PairError;

    /// `member/member`; the member listed first is the smaller one.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| PairError::Parse(format!("{s:?}: expected member/member")))?;
        let (ma, sa) = parse_member(a.trim())?;
        let (mb, sb) = parse_member(b.trim())?;
        match (sa, sb) {
            (Some(Slot::First), Some(Slot::Second)) => DualPairSpec::new(ma, mb, Slot::First),
            (Some(Slot::Second), Some(Slot::First)) => DualPairSpec::new(mb, ma, Slot::Second),
            _ => Err(PairError::Parse(format!("{s:?}: members must come from the two different slots"))),
        }
    }
}

/// Small stable-range pairs used by exhaustive checks.
pub fn registered_small_pairs() -> Vec<DualPairSpec> {
    vec![
        DualPairSpec::r(1, 2, 2, Slot::First),
        DualPairSpec::r(1, 2, 3, Slot::First),
        DualPairSpec::r(1, 3, 3, Slot::First),
        DualPairSpec::r(2, 1, 1, Slot::Second),
        DualPairSpec::r(3, 2, 1, Slot::Second),
        DualPairSpec::c(1, 0, 1, 1, Slot::First),
        DualPairSpec::c(1, 1, 2, 2, Slot::First),
        DualPairSpec::c(2, 2, 1, 1, Slot::Second),
        DualPairSpec::h(1, 1, 1, Slot::First),
        DualPairSpec::h(2, 2, 2, Slot::First),
        DualPairSpec::h(2, 1, 0, Slot::Second),
        DualPairSpec::cx(1, 4, Slot::First),
        DualPairSpec::cx(1, 5, Slot::First),
        DualPairSpec::cx(2, 2, Slot::Second),
    ]
}
