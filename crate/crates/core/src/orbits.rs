//! Nilpotent `K_C`-orbits in `p*` as signed Young diagrams.
//!
//! A point of `p*` is read as an odd nilpotent operator `X` on `V = V+ (+) V-`
//! (see [`crate::model`]). A row of length `l` with leading sign `s` is a Jordan
//! chain `v, Xv, .., X^(l-1) v` whose generator `v` lies in `V_s`; the signs of
//! the boxes alternate along the chain. For the complex members there is no
//! grading and every row is written with a leading `+`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exactlin::{inverse, Matrix, Scalar};
use crate::model::{self, gram};
use crate::pairs::{DualPairSpec, Layout, Member, Side};

pub const DEFAULT_SIZE_BOUND: usize = 12;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OrbitError {
    #[error("cannot parse diagram: {0}")]
    Parse(String),
    #[error("invalid diagram for {member}: {reason}")]
    Invalid { member: String, reason: String },
    #[error("point is not nilpotent")]
    NotNilpotent,
    #[error("diagram size {0} exceeds the enumeration bound {1}")]
    SizeBound(usize, usize),
    #[error("orbits live on different pairs or sides")]
    Mismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Sign of the box at position `j` of a row led by `self`.
    pub fn at(self, j: usize) -> Sign {
        if j % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }

    fn ch(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Row {
    pub len: usize,
    pub sign: Sign,
}

impl Row {
    pub fn new(len: usize, sign: Sign) -> Self {
        Row { len, sign }
    }

    /// Number of boxes of sign `t`.
    pub fn count(self, t: Sign) -> usize {
        if t == self.sign {
            self.len.div_ceil(2)
        } else {
            self.len / 2
        }
    }

    /// Leading sign of the same row read from its last box.
    pub fn last_sign(self) -> Sign {
        self.sign.at(self.len - 1)
    }
}

impl Ord for Row {
    fn cmp(&self, o: &Self) -> Ordering {
        o.len.cmp(&self.len).then(self.sign.cmp(&o.sign))
    }
}

impl PartialOrd for Row {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Rows in canonical order: longest first, `+` before `-` on ties.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedDiagram {
    rows: Vec<Row>,
}

impl SignedDiagram {
    pub fn new(mut rows: Vec<Row>) -> Self {
        rows.retain(|r| r.len > 0);
        rows.sort();
        SignedDiagram { rows }
    }

    pub fn empty() -> Self {
        SignedDiagram { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(|r| r.len).sum()
    }

    pub fn count(&self, t: Sign) -> usize {
        self.rows.iter().map(|r| r.count(t)).sum()
    }

    /// Underlying partition.
    pub fn partition(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.len).collect()
    }

    /// Number of rows of length `l` led by `s`.
    pub fn multiplicity(&self, l: usize, s: Sign) -> usize {
        self.rows.iter().filter(|r| r.len == l && r.sign == s).count()
    }

    /// `rank(X^k restricted to V_t)` for the operator of this diagram.
    pub fn rank_on(&self, t: Sign, k: usize) -> usize {
        self.rows
            .iter()
            .map(|r| (0..r.len.saturating_sub(k)).filter(|&j| r.sign.at(j) == t).count())
            .sum()
    }

    /// `rank(X^k)`.
    pub fn rank(&self, k: usize) -> usize {
        self.rows.iter().map(|r| r.len.saturating_sub(k)).sum()
    }

    /// Reads every row from its other end.
    pub fn reversed(&self) -> SignedDiagram {
        SignedDiagram::new(self.rows.iter().map(|r| Row::new(r.len, r.last_sign())).collect())
    }

    /// Adds one box at the start of each of the first `c` rows, padding with
    /// new rows of length one when there are fewer rows. The new box of a row
    /// led by `s` is led by `-s`; new rows get the signs in `fresh`.
    pub fn add_column_front(&self, c: usize, fresh: &[Sign]) -> SignedDiagram {
        let mut rows: Vec<Row> = Vec::new();
        for (k, r) in self.rows.iter().enumerate() {
            if k < c {
                rows.push(Row::new(r.len + 1, r.sign.flip()));
            } else {
                rows.push(*r);
            }
        }
        rows.extend(fresh.iter().map(|&s| Row::new(1, s)));
        SignedDiagram::new(rows)
    }
}

impl fmt::Display for SignedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .rows
            .iter()
            .map(|r| (0..r.len).map(|j| r.sign.at(j).ch()).collect())
            .collect();
        write!(f, "{}", parts.join("/"))
    }
}

impl FromStr for SignedDiagram {
    type Err = OrbitError;

    fn from_str(s: &str) -> Result<Self, OrbitError> {
        let s = s.trim();
        if s.is_empty() || s == "0" || s == "()" {
            return Ok(SignedDiagram::empty());
        }
        let mut rows = Vec::new();
        for part in s.split('/') {
            let chars: Vec<char> = part.trim().chars().collect();
            if chars.is_empty() {
                return Err(OrbitError::Parse(format!("empty row in {s:?}")));
            }
            let sign = match chars[0] {
                '+' => Sign::Plus,
                '-' => Sign::Minus,
                c => return Err(OrbitError::Parse(format!("unexpected {c:?} in {s:?}"))),
            };
            for (j, &c) in chars.iter().enumerate() {
                if c != sign.at(j).ch() {
                    return Err(OrbitError::Parse(format!("signs must alternate in row {part:?}")));
                }
            }
            rows.push(Row::new(chars.len(), sign));
        }
        let d = SignedDiagram::new(rows);
        if d.to_string() != s {
            return Err(OrbitError::Parse(format!("rows of {s:?} are not in canonical order")));
        }
        Ok(d)
    }
}

/// How chains of a given length pair up under the invariant form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pairing {
    /// No form.
    Free,
    /// Each chain is paired with itself.
    SelfPaired,
    /// Chains are paired two by two; the partner of a chain led by `s` is led by `s` or `-s`.
    Partner { flip: bool },
}

fn pairing(member: Member, len: usize) -> Pairing {
    let form = member.form();
    let odd = len % 2 == 1;
    // (-1)^(l-1) must equal eps for the chain to carry a nonzero self-pairing.
    let parity_ok = (form.eps == 1) == odd;
    match form.layout {
        Layout::Free => Pairing::Free,
        Layout::Single => {
            if parity_ok {
                Pairing::SelfPaired
            } else {
                Pairing::Partner { flip: false }
            }
        }
        Layout::Orth => {
            if parity_ok && odd {
                Pairing::SelfPaired
            } else {
                // Same-sign boxes pair: partner leads with s * (-1)^(l-1).
                Pairing::Partner { flip: !odd }
            }
        }
        Layout::Paired => {
            if parity_ok && !odd {
                Pairing::SelfPaired
            } else {
                // Opposite-sign boxes pair: partner leads with -s * (-1)^(l-1).
                Pairing::Partner { flip: odd }
            }
        }
    }
}

/// Checks the signature and the pairing constraints of `d` for `member`.
pub fn validate(member: Member, d: &SignedDiagram) -> Result<(), OrbitError> {
    let bad = |reason: String| Err(OrbitError::Invalid { member: member.group_name(), reason });
    if d.size() != member.size() {
        return bad(format!("{} boxes, expected {}", d.size(), member.size()));
    }
    if member.is_complex() {
        if d.rows.iter().any(|r| r.sign != Sign::Plus) {
            return bad("rows of a complex group are written with a leading +".into());
        }
    } else {
        let (a, b) = member.signature();
        if d.count(Sign::Plus) != a || d.count(Sign::Minus) != b {
            return bad(format!(
                "signature ({}, {}), expected ({a}, {b})",
                d.count(Sign::Plus),
                d.count(Sign::Minus)
            ));
        }
    }
    let mut lens: Vec<usize> = d.partition();
    lens.dedup();
    for l in lens {
        let (mp, mm) = (d.multiplicity(l, Sign::Plus), d.multiplicity(l, Sign::Minus));
        match pairing(member, l) {
            Pairing::Free | Pairing::SelfPaired => {}
            Pairing::Partner { flip: true } => {
                if mp != mm {
                    return bad(format!("rows of length {l} must pair a + row with a - row"));
                }
            }
            Pairing::Partner { flip: false } => {
                if mp % 2 != 0 || mm % 2 != 0 {
                    return bad(format!("rows of length {l} must occur in pairs of equal sign"));
                }
            }
        }
    }
    Ok(())
}

/// A point of `p*` (side `G`) or `p'*` (side `G'`), in the block coordinates of the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPoint {
    pub pair: DualPairSpec,
    pub side: Side,
    pub blocks: Vec<Matrix>,
}

impl PPoint {
    pub fn new(pair: DualPairSpec, side: Side, blocks: Vec<Matrix>) -> Self {
        PPoint { pair, side, blocks }
    }

    pub fn zero(pair: DualPairSpec, side: Side) -> Self {
        let blocks = pair
            .side_member(side)
            .p_blocks()
            .iter()
            .map(|b| {
                let (r, c) = b.matrix_shape();
                Matrix::zeros(r, c)
            })
            .collect();
        PPoint { pair, side, blocks }
    }

    pub fn member(&self) -> Member {
        self.pair.side_member(self.side)
    }

    pub fn operator(&self) -> Matrix {
        model::to_operator(self.member(), &self.blocks)
    }

    pub fn is_well_formed(&self) -> bool {
        let kinds = self.member().p_blocks();
        kinds.len() == self.blocks.len()
            && kinds.iter().zip(&self.blocks).all(|(k, m)| model::blocks_satisfy_shape(*k, m))
    }

    pub fn coords(&self) -> Vec<Scalar> {
        model::p_coords(self.member(), &self.blocks)
    }

    pub fn scale(&self, s: &Scalar) -> PPoint {
        PPoint::new(self.pair, self.side, self.blocks.iter().map(|m| m.scale(s)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Orbit {
    pub pair: DualPairSpec,
    pub side: Side,
    pub diagram: SignedDiagram,
}

impl Orbit {
    pub fn new(pair: DualPairSpec, side: Side, diagram: SignedDiagram) -> Result<Self, OrbitError> {
        validate(pair.side_member(side), &diagram)?;
        Ok(Orbit { pair, side, diagram })
    }

    pub fn parse(pair: DualPairSpec, side: Side, text: &str) -> Result<Self, OrbitError> {
        Orbit::new(pair, side, text.parse()?)
    }

    pub fn zero(pair: DualPairSpec, side: Side) -> Self {
        let member = pair.side_member(side);
        let rows = if member.is_complex() {
            vec![Row::new(1, Sign::Plus); member.size()]
        } else {
            let (a, b) = member.signature();
            let mut rows = vec![Row::new(1, Sign::Plus); a];
            rows.extend(vec![Row::new(1, Sign::Minus); b]);
            rows
        };
        Orbit { pair, side, diagram: SignedDiagram::new(rows) }
    }

    pub fn member(&self) -> Member {
        self.pair.side_member(self.side)
    }

    pub fn is_zero(&self) -> bool {
        self.diagram.rows.iter().all(|r| r.len == 1)
    }
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.diagram)
    }
}

/// A formal combination `sum m_j [closure(O_j)]` on one side of one pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub terms: Vec<(u64, Orbit)>,
}

impl Cycle {
    pub fn new(terms: Vec<(u64, Orbit)>) -> Result<Self, OrbitError> {
        for (k, (m, o)) in terms.iter().enumerate() {
            if *m == 0 {
                return Err(OrbitError::Parse("cycle multiplicities are positive".into()));
            }
            if o.pair != terms[0].1.pair || o.side != terms[0].1.side {
                return Err(OrbitError::Mismatch);
            }
            if terms[..k].iter().any(|(_, p)| p == o) {
                return Err(OrbitError::Parse(format!("orbit {o} repeated in cycle")));
            }
        }
        Ok(Cycle { terms })
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(m, o)| format!("{m}[{o}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Parses `"2[+-/-+] + [+/-]"`-style cycles.
pub fn parse_cycle(pair: DualPairSpec, side: Side, text: &str) -> Result<Cycle, OrbitError> {
    let mut terms = Vec::new();
    for part in text.split(" + ").map(str::trim).filter(|p| !p.is_empty()) {
        let open = part.find('[').ok_or_else(|| OrbitError::Parse(format!("missing '[' in {part:?}")))?;
        if !part.ends_with(']') {
            return Err(OrbitError::Parse(format!("missing ']' in {part:?}")));
        }
        let m: u64 = if open == 0 {
            1
        } else {
            part[..open].trim().parse().map_err(|_| OrbitError::Parse(format!("bad multiplicity in {part:?}")))?
        };
        terms.push((m, Orbit::parse(pair, side, &part[open + 1..part.len() - 1])?));
    }
    Cycle::new(terms)
}

fn signed_rows(remaining: usize, max_row: Row, out: &mut Vec<Row>, acc: &mut Vec<Vec<Row>>, complex: bool) {
    if remaining == 0 {
        acc.push(out.clone());
        return;
    }
    for len in (1..=remaining.min(max_row.len)).rev() {
        for sign in [Sign::Plus, Sign::Minus] {
            if complex && sign == Sign::Minus {
                continue;
            }
            let row = Row::new(len, sign);
            if row < max_row {
                continue;
            }
            out.push(row);
            signed_rows(remaining - len, row, out, acc, complex);
            out.pop();
        }
    }
}

/// All valid diagrams of `member`, sorted by their text form.
pub fn enumerate_diagrams(member: Member, bound: usize) -> Result<Vec<SignedDiagram>, OrbitError> {
    let n = member.size();
    if n > bound {
        return Err(OrbitError::SizeBound(n, bound));
    }
    let mut acc = Vec::new();
    signed_rows(n, Row::new(n.max(1), Sign::Plus), &mut Vec::new(), &mut acc, member.is_complex());
    let mut out: Vec<SignedDiagram> =
        acc.into_iter().map(SignedDiagram::new).filter(|d| validate(member, d).is_ok()).collect();
    out.sort_by_key(|d| d.to_string());
    out.dedup();
    Ok(out)
}

pub fn enumerate_orbits_bounded(pair: &DualPairSpec, side: Side, bound: usize) -> Result<Vec<Orbit>, OrbitError> {
    Ok(enumerate_diagrams(pair.side_member(side), bound)?
        .into_iter()
        .map(|diagram| Orbit { pair: *pair, side, diagram })
        .collect())
}

pub fn enumerate_orbits(pair: &DualPairSpec, side: Side) -> Result<Vec<Orbit>, OrbitError> {
    enumerate_orbits_bounded(pair, side, DEFAULT_SIZE_BOUND)
}

/// `tr(X^k) = 0` for `1 <= k <= dim V`, which over characteristic zero is nilpotency of
/// `X`; the traces of `X^k` are the traces of the alternating words in the blocks.
pub fn is_nilpotent(x: &PPoint) -> bool {
    let op = x.operator();
    let n = op.rows();
    let mut pow = op.clone();
    for _ in 1..=n {
        if !pow.trace().is_zero() {
            return false;
        }
        pow = pow.mul(&op);
    }
    true
}

/// `rank(X^k restricted to V+)` and `rank(X^k restricted to V-)` for `k = 0..=dim V`.
pub fn rank_signature(member: Member, blocks: &[Matrix]) -> Vec<(usize, usize)> {
    let op = model::to_operator(member, blocks);
    let (a, b) = member.signature();
    let n = a + b;
    let mut pow = Matrix::identity(n);
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        out.push((pow.submatrix(0, 0, n, a).rank(), pow.submatrix(0, a, n, b).rank()));
        pow = pow.mul(&op);
    }
    out
}

/// Rank data predicted by a diagram, comparable with [`rank_signature`].
pub fn diagram_rank_signature(member: Member, d: &SignedDiagram) -> Vec<(usize, usize)> {
    let n = member.size();
    (0..=n)
        .map(|k| {
            if member.is_complex() {
                (d.rank(k), 0)
            } else {
                (d.rank_on(Sign::Plus, k), d.rank_on(Sign::Minus, k))
            }
        })
        .collect()
}

fn diagram_from_ranks(member: Member, ranks: &[(usize, usize)]) -> SignedDiagram {
    let n = member.size();
    let r = |t: Sign, k: usize| -> i64 {
        if k > n {
            return 0;
        }
        (match t {
            Sign::Plus => ranks[k].0,
            Sign::Minus => ranks[k].1,
        }) as i64
    };
    let mut rows = Vec::new();
    if member.is_complex() {
        let total = |k: usize| r(Sign::Plus, k) + r(Sign::Minus, k);
        // Rows of length >= l: rank(X^(l-1)) - rank(X^l).
        let at_least = |l: usize| total(l - 1) - total(l);
        for l in 1..=n {
            let m = at_least(l) - at_least(l + 1);
            rows.extend(std::iter::repeat_n(Row::new(l, Sign::Plus), m as usize));
        }
    } else {
        // Rows of length >= l led by t: r_t(l-1) - r_{-t}(l).
        let at_least = |l: usize, t: Sign| r(t, l - 1) - r(t.flip(), l);
        for l in 1..=n {
            for t in [Sign::Plus, Sign::Minus] {
                let m = at_least(l, t) - at_least(l + 1, t);
                rows.extend(std::iter::repeat_n(Row::new(l, t), m as usize));
            }
        }
    }
    SignedDiagram::new(rows)
}

pub fn classify(x: &PPoint) -> Result<Orbit, OrbitError> {
    if !is_nilpotent(x) {
        return Err(OrbitError::NotNilpotent);
    }
    let member = x.member();
    let d = diagram_from_ranks(member, &rank_signature(member, &x.blocks));
    Orbit::new(x.pair, x.side, d)
}

/// Chain basis of the diagram with its Gram matrix and the shift operator.
struct ChainModel {
    /// `(row, position)` of each basis vector.
    vecs: Vec<(usize, usize)>,
    signs: Vec<Sign>,
    gram: Matrix,
    x: Matrix,
}

fn chain_model(member: Member, d: &SignedDiagram) -> ChainModel {
    let eps = Scalar::int(member.form().eps as i64);
    let mut vecs = Vec::new();
    let mut start = Vec::new();
    for (i, r) in d.rows.iter().enumerate() {
        start.push(vecs.len());
        for j in 0..r.len {
            vecs.push((i, j));
        }
    }
    let n = vecs.len();
    let signs: Vec<Sign> = vecs.iter().map(|&(i, j)| d.rows[i].sign.at(j)).collect();
    let mut x = Matrix::zeros(n, n);
    for (k, &(i, j)) in vecs.iter().enumerate() {
        if j + 1 < d.rows[i].len {
            x[(k + 1, k)] = Scalar::one();
        }
    }
    let mut g = Matrix::zeros(n, n);
    let alt = |j: usize| Scalar::int(if j % 2 == 0 { 1 } else { -1 });
    let mut used = vec![false; d.rows.len()];
    for i in 0..d.rows.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = d.rows[i];
        let l = r.len;
        match pairing(member, l) {
            Pairing::Free => {}
            Pairing::SelfPaired => {
                // Leading sign as the scale keeps the small representatives tidy.
                let c = Scalar::int(if member.is_complex() { 1 } else { r.sign.as_int() });
                for j in 0..l {
                    g[(start[i] + j, start[i] + l - 1 - j)] = &c * &alt(j);
                }
            }
            Pairing::Partner { flip } => {
                let want = if flip { r.sign.flip() } else { r.sign };
                let k = (i + 1..d.rows.len())
                    .find(|&k| !used[k] && d.rows[k].len == l && d.rows[k].sign == want)
                    .expect("validated diagram has a partner row");
                used[k] = true;
                for j in 0..l {
                    let (a, b) = (start[i] + j, start[k] + l - 1 - j);
                    g[(a, b)] = alt(j);
                    g[(b, a)] = &eps * &alt(j);
                }
            }
        }
    }
    ChainModel { vecs, signs, gram: g, x }
}

/// Partner of each basis vector under a Gram matrix with one nonzero per row.
fn partner(g: &Matrix, a: usize) -> (usize, Scalar) {
    (0..g.cols())
        .find(|&b| !g[(a, b)].is_zero())
        .map(|b| (b, g[(a, b)].clone()))
        .expect("nondegenerate chain form")
}

/// Basis of a subspace on which `g` is symmetric, orthonormal up to the factor `target`.
fn orthonormal(g: &Matrix, idx: &[usize], target: &Scalar, n: usize) -> Vec<Vec<Scalar>> {
    let mut done = vec![false; n];
    let mut out = Vec::new();
    let scale = target.sqrt().expect("target is +-1");
    for &a in idx {
        if done[a] {
            continue;
        }
        let (b, beta) = partner(g, a);
        done[a] = true;
        done[b] = true;
        let mut v = vec![Scalar::zero(); n];
        if a == b {
            // beta is +-1.
            let s = &scale * &beta.sqrt().expect("unit").inv().expect("nonzero");
            v[a] = s;
            out.push(v);
        } else {
            let two_beta_inv = (&Scalar::int(2) * &beta).inv().expect("nonzero");
            let mut w = vec![Scalar::zero(); n];
            v[a] = scale.clone();
            v[b] = &scale * &two_beta_inv;
            w[a] = &scale * &Scalar::i();
            w[b] = -(&(&scale * &Scalar::i()) * &two_beta_inv);
            out.push(v);
            out.push(w);
        }
    }
    out
}

/// Symplectic basis `(e.., f..)` with `B(e_k, f_k) = 1` of a subspace where `g` is skew.
fn symplectic(g: &Matrix, idx: &[usize], n: usize) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) {
    let mut done = vec![false; n];
    let (mut es, mut fs) = (Vec::new(), Vec::new());
    for &a in idx {
        if done[a] {
            continue;
        }
        let (b, beta) = partner(g, a);
        done[a] = true;
        done[b] = true;
        let mut e = vec![Scalar::zero(); n];
        let mut f = vec![Scalar::zero(); n];
        e[a] = Scalar::one();
        f[b] = beta.inv().expect("nonzero");
        es.push(e);
        fs.push(f);
    }
    (es, fs)
}

/// An explicit point of the orbit, built from a chain basis whose Gram matrix
/// is brought to the model form.
pub fn representative(o: &Orbit) -> PPoint {
    let member = o.member();
    let cm = chain_model(member, &o.diagram);
    let n = cm.vecs.len();
    let of_sign = |t: Sign| -> Vec<usize> { (0..n).filter(|&k| cm.signs[k] == t).collect() };
    let all: Vec<usize> = (0..n).collect();
    let eps = member.form().eps;
    let cols: Vec<Vec<Scalar>> = match member.form().layout {
        Layout::Free => {
            let mut cols = Vec::new();
            for k in of_sign(Sign::Plus).into_iter().chain(of_sign(Sign::Minus)) {
                let mut v = vec![Scalar::zero(); n];
                v[k] = Scalar::one();
                cols.push(v);
            }
            cols
        }
        Layout::Single if eps == 1 => orthonormal(&cm.gram, &all, &Scalar::one(), n),
        Layout::Single => {
            let (es, fs) = symplectic(&cm.gram, &all, n);
            es.into_iter().chain(fs).collect()
        }
        Layout::Orth if eps == 1 => {
            let mut cols = orthonormal(&cm.gram, &of_sign(Sign::Plus), &Scalar::one(), n);
            cols.extend(orthonormal(&cm.gram, &of_sign(Sign::Minus), &Scalar::int(-1), n));
            cols
        }
        Layout::Orth => {
            let (e1, f1) = symplectic(&cm.gram, &of_sign(Sign::Plus), n);
            let (e2, f2) = symplectic(&cm.gram, &of_sign(Sign::Minus), n);
            e1.into_iter().chain(f1).chain(e2).chain(f2).collect()
        }
        Layout::Paired => {
            let (es, fs) = symplectic(&cm.gram, &of_sign(Sign::Plus), n);
            es.into_iter().chain(fs).collect()
        }
    };
    let t = Matrix::from_fn(n, n, |r, c| cols[c][r].clone());
    if let Some(target) = gram(member) {
        debug_assert_eq!(t.transpose().mul(&cm.gram).mul(&t), target, "standardized Gram");
    }
    let ti = inverse(&t).expect("basis change is invertible");
    let op = ti.mul(&cm.x).mul(&t);
    PPoint::new(o.pair, o.side, model::from_operator(member, &op))
}

/// `dim K_C x = dim k - dim k_x`.
pub fn dim_orbit(o: &Orbit) -> usize {
    let x = representative(o);
    dim_at(&x)
}

pub fn dim_at(x: &PPoint) -> usize {
    let member = x.member();
    model::coadjoint_matrix(member, &model::k_basis(member), &x.blocks).rank()
}

/// Closure order read off the diagrams: every `rank(X^k | V_t)` of `o1` is at most
/// the corresponding rank of `o2`.
pub fn closure_leq(o1: &Orbit, o2: &Orbit) -> Result<bool, OrbitError> {
    if o1.pair != o2.pair || o1.side != o2.side {
        return Err(OrbitError::Mismatch);
    }
    let m = o1.member();
    let r1 = diagram_rank_signature(m, &o1.diagram);
    let r2 = diagram_rank_signature(m, &o2.diagram);
    Ok(r1.iter().zip(&r2).all(|(a, b)| a.0 <= b.0 && a.1 <= b.1))
}

/// Rank certificates cutting out the closure of `o2`, evaluated at a point.
pub fn satisfies_rank_certificates(x: &PPoint, o2: &Orbit) -> bool {
    let m = x.member();
    let r = rank_signature(m, &x.blocks);
    let bound = diagram_rank_signature(m, &o2.diagram);
    if m.is_complex() {
        r.iter().zip(&bound).all(|(a, b)| a.0 + a.1 <= b.0)
    } else {
        r.iter().zip(&bound).all(|(a, b)| a.0 <= b.0 && a.1 <= b.1)
    }
}

fn swap_matrix(n: usize) -> Matrix {
    let mut p = Matrix::zeros(2 * n, 2 * n);
    p.set_block(0, n, &Matrix::identity(n));
    p.set_block(n, 0, &Matrix::identity(n));
    p
}

/// The Chevalley involution on `V`-operators of `p`.
pub fn chevalley_operator(member: Member, x: &Matrix) -> Matrix {
    match member {
        Member::Sp2nR { n } | Member::OStar { n } => {
            let p = swap_matrix(n);
            p.mul(x).mul(&p)
        }
        Member::U { .. } => x.transpose(),
        _ => x.neg(),
    }
}

/// The Chevalley involution on `k`, compatible with [`chevalley_operator`].
pub fn chevalley_lie(member: Member, z: &Matrix) -> Matrix {
    match member {
        Member::Sp2nR { n } | Member::OStar { n } => {
            let p = swap_matrix(n);
            p.mul(z).mul(&p)
        }
        Member::U { .. } => z.transpose().neg(),
        _ => z.clone(),
    }
}

pub fn chevalley_point(x: &PPoint) -> PPoint {
    let m = x.member();
    PPoint::new(x.pair, x.side, model::from_operator(m, &chevalley_operator(m, &x.operator())))
}

pub fn chevalley_twist(o: &Orbit) -> Orbit {
    classify(&chevalley_point(&representative(o))).expect("the involution preserves nilpotency")
}

/// Diagram-level form of the twist: each row is read from its last box
/// (complex members carry no signs and are fixed).
pub fn chevalley_twist_rule(o: &Orbit) -> Orbit {
    if o.member().is_complex() {
        return o.clone();
    }
    Orbit { pair: o.pair, side: o.side, diagram: o.diagram.reversed() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::{registered_small_pairs, Slot};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sp2() -> DualPairSpec {
        DualPairSpec::r(1, 2, 2, Slot::First)
    }

    fn all_sides() -> Vec<(DualPairSpec, Side)> {
        let mut out = Vec::new();
        for p in registered_small_pairs() {
            out.push((p, Side::G));
            out.push((p, Side::GPrime));
        }
        out
    }

    #[test]
    fn diagram_text_round_trip() {
        for s in ["+-+/+-/-", "", "+/-", "-+-/+", "+-/+-/-+"] {
            let d: SignedDiagram = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("+/+-".parse::<SignedDiagram>().is_err());
        assert!("++".parse::<SignedDiagram>().is_err());
        assert!("-/+".parse::<SignedDiagram>().is_err());
    }

    #[test]
    fn small_enumerations() {
        let sp = enumerate_orbits(&sp2(), Side::G).unwrap();
        let names: Vec<String> = sp.iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["+-", "+/-", "-+"]);
        let u = DualPairSpec::c(1, 1, 2, 2, Slot::First);
        assert_eq!(enumerate_orbits(&u, Side::G).unwrap().len(), 3);
        let big = DualPairSpec::r(7, 1, 1, Slot::Second);
        assert_eq!(enumerate_orbits(&big, Side::GPrime), Err(OrbitError::SizeBound(14, 12)));
    }

    #[test]
    fn nilpotency_examples() {
        let one = Matrix::from_ints(&[&[1]]);
        let zero = Matrix::from_ints(&[&[0]]);
        let x = PPoint::new(sp2(), Side::G, vec![one.clone(), zero.clone()]);
        assert!(is_nilpotent(&x));
        assert!(!is_nilpotent(&PPoint::new(sp2(), Side::G, vec![one.clone(), one.clone()])));
        assert!(is_nilpotent(&PPoint::zero(sp2(), Side::G)));
        let four = PPoint::new(sp2(), Side::G, vec![Matrix::from_ints(&[&[4]]), zero.clone()]);
        assert_eq!(classify(&four).unwrap(), classify(&x).unwrap());
        let o = Orbit::parse(sp2(), Side::G, "-+").unwrap();
        assert_eq!(representative(&o).blocks, vec![one, zero]);
        assert_eq!(dim_orbit(&o), 1);
        assert_eq!(dim_orbit(&Orbit::zero(sp2(), Side::G)), 0);
    }

    #[test]
    fn round_trip_on_all_registered_sides() {
        for (pair, side) in all_sides() {
            for o in enumerate_orbits(&pair, side).unwrap() {
                let x = representative(&o);
                assert!(x.is_well_formed(), "{pair} {side} {o}");
                assert_eq!(classify(&x).unwrap(), o, "{pair} {side}");
            }
        }
    }

    #[test]
    fn classification_is_invariant_under_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for (pair, side) in all_sides() {
            let member = pair.side_member(side);
            for o in enumerate_orbits(&pair, side).unwrap() {
                let x = representative(&o);
                let g = model::random_k_element(member, &mut rng);
                let y = PPoint::new(pair, side, model::group_on_p(member, &g, &x.blocks));
                assert_eq!(classify(&y).unwrap(), o);
            }
        }
    }

    /// Independent count: distinct rank data over all small-entry nilpotent points.
    fn brute_force_classes(pair: DualPairSpec, side: Side, values: &[Scalar]) -> usize {
        let member = pair.side_member(side);
        let d = member.dim_p();
        let mut seen = std::collections::HashSet::new();
        let mut idx = vec![0usize; d];
        loop {
            let coords: Vec<Scalar> = idx.iter().map(|&k| values[k].clone()).collect();
            let blocks = model::p_from_coords(member, &coords);
            let x = PPoint::new(pair, side, blocks);
            if is_nilpotent(&x) {
                seen.insert(rank_signature(member, &x.blocks));
            }
            let mut k = 0;
            loop {
                if k == d {
                    return seen.len();
                }
                idx[k] += 1;
                if idx[k] < values.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force_rank_classes() {
        let small = [Scalar::zero(), Scalar::one(), Scalar::int(-1), Scalar::i(), Scalar::gauss(0, -1)];
        let cases = [
            (sp2(), Side::G),
            (sp2(), Side::GPrime),
            (DualPairSpec::r(1, 2, 3, Slot::First), Side::GPrime),
            (DualPairSpec::c(1, 1, 2, 2, Slot::First), Side::G),
            (DualPairSpec::c(1, 0, 1, 1, Slot::First), Side::GPrime),
            (DualPairSpec::h(1, 1, 1, Slot::First), Side::G),
            (DualPairSpec::h(1, 1, 1, Slot::First), Side::GPrime),
            (DualPairSpec::cx(1, 4, Slot::First), Side::G),
            (DualPairSpec::r(2, 1, 1, Slot::Second), Side::GPrime),
            (DualPairSpec::cx(2, 2, Slot::Second), Side::G),
        ];
        for (pair, side) in cases {
            let expected = enumerate_orbits(&pair, side).unwrap().len();
            let member = pair.side_member(side);
            let values: &[Scalar] = if member.dim_p() > 6 { &small[..3] } else { &small };
            assert_eq!(brute_force_classes(pair, side, values), expected, "{pair} {side}");
        }
    }

    #[test]
    fn closure_order_examples_and_certificates() {
        let sp = enumerate_orbits(&sp2(), Side::G).unwrap();
        let (a, z, b) = (&sp[0], &sp[1], &sp[2]);
        assert!(closure_leq(z, a).unwrap() && closure_leq(z, b).unwrap());
        assert!(!closure_leq(a, b).unwrap() && !closure_leq(b, a).unwrap());
        for (pair, side) in all_sides() {
            let os = enumerate_orbits(&pair, side).unwrap();
            for o1 in &os {
                let x = representative(o1);
                for o2 in &os {
                    let leq = closure_leq(o1, o2).unwrap();
                    assert_eq!(leq, satisfies_rank_certificates(&x, o2));
                    if leq && o1 != o2 {
                        assert!(dim_orbit(o1) < dim_orbit(o2), "{pair} {side} {o1} < {o2}");
                        assert!(!closure_leq(o2, o1).unwrap());
                    }
                    for o3 in &os {
                        if leq && closure_leq(o2, o3).unwrap() {
                            assert!(closure_leq(o1, o3).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn twist_is_an_involution_matching_the_row_rule() {
        let sp = enumerate_orbits(&sp2(), Side::G).unwrap();
        assert_eq!(chevalley_twist(&sp[0]), sp[2]);
        for (pair, side) in all_sides() {
            let member = pair.side_member(side);
            for z in model::k_basis(member) {
                let x = representative(&enumerate_orbits(&pair, side).unwrap()[0]).operator();
                let lhs = chevalley_operator(member, &z.commutator(&x));
                let rhs = chevalley_lie(member, &z).commutator(&chevalley_operator(member, &x));
                assert_eq!(lhs, rhs, "{pair} {side}");
            }
            for o in enumerate_orbits(&pair, side).unwrap() {
                let t = chevalley_twist(&o);
                assert_eq!(t, chevalley_twist_rule(&o), "{pair} {side} {o}");
                assert_eq!(chevalley_twist(&t), o);
            }
        }
    }

    #[test]
    fn scaling_drives_nilpotent_points_to_zero() {
        // Nilpotent orbits are conical, so t*x stays in the orbit and tends to 0.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (pair, side) in all_sides() {
            for o in enumerate_orbits(&pair, side).unwrap() {
                let x = representative(&o);
                let t = Scalar::frac(1, rng.gen_range(2..9));
                let y = x.scale(&t);
                assert_eq!(classify(&y).unwrap(), o);
                let tiny = x.scale(&t.pow(20));
                assert!(tiny.coords().iter().all(|c| c.norm_sq() < num_rational::BigRational::new(1.into(), 1_000_000.into())));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn parse_print_round_trip(lens in proptest::collection::vec((1usize..5, proptest::bool::ANY), 0..5)) {
            let d = SignedDiagram::new(lens.iter().map(|&(l, s)| Row::new(l, if s { Sign::Plus } else { Sign::Minus })).collect());
            let text = d.to_string();
            proptest::prop_assert_eq!(text.parse::<SignedDiagram>().unwrap(), d);
        }
    }
}
