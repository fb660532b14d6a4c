//! The theta lift on orbits, cycles, complex partitions and orbit data.
//!
//! Weights on a stabilizer `k_x` are stored as their values on the basis
//! returned by [`model::stabilizer_basis`] at the datum's point, so a datum is
//! meaningful only together with that point. The twist `ς` enters through its
//! derivative `Z -> -tr(Z | W) / 2`, the square root of `u -> det(u | W)^-1`.

use serde::{Deserialize, Serialize};

use crate::exactlin::{coordinates, LinError, Matrix, Scalar, SpanCoordinates};
use crate::model;
use crate::moment::{construct_w_at, stabilizer_map, MomentError, StabilizerMap};
use crate::orbits::{
    chevalley_lie, chevalley_point, classify, closure_leq, representative, Cycle, Orbit, OrbitError, PPoint, Row,
    Sign, SignedDiagram,
};
use crate::pairs::{DualPairSpec, Layout, Member, Side};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("pair {0} is not in the stable range")]
    NotStableRange(String),
    #[error("input must lie on the smaller member (side G)")]
    WrongSide,
    #[error("invalid partition {0:?} for {1}")]
    Partition(Vec<usize>, String),
    #[error("tower step {0}: {1}")]
    Chain(usize, String),
    #[error("tower step {0}: lifted datum is not admissible")]
    NotAdmissible(usize),
    #[error("bad datum: {0}")]
    Datum(String),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Weight and dimension of `χ_x`, with a record of the `ς` factors folded into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterTag {
    pub base_weight: Vec<Scalar>,
    pub dim: usize,
    pub varsigma_twists: Vec<String>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDatum {
    pub orbit: Orbit,
    pub rep: PPoint,
    pub character: CharacterTag,
}

impl OrbitDatum {
    /// Datum at the canonical representative with the given weight.
    pub fn new(orbit: Orbit, weight: Vec<Scalar>, dim: usize, label: &str) -> Result<Self, LiftError> {
        let rep = representative(&orbit);
        let n = stabilizer(&rep).len();
        if weight.len() != n {
            return Err(LiftError::Datum(format!("weight has {} entries, k_x has dimension {n}", weight.len())));
        }
        if dim == 0 {
            return Err(LiftError::Datum("dim must be positive".into()));
        }
        let character = CharacterTag { base_weight: weight, dim, varsigma_twists: Vec::new(), label: label.into() };
        Ok(OrbitDatum { orbit, rep, character })
    }

    /// The datum with zero weight (trivial `χ_x` of dimension one).
    pub fn trivial(orbit: Orbit) -> Self {
        let n = stabilizer(&representative(&orbit)).len();
        OrbitDatum::new(orbit, vec![Scalar::zero(); n], 1, "").expect("length matches")
    }

    pub fn k_x(&self) -> Vec<Matrix> {
        stabilizer(&self.rep)
    }
}

fn stabilizer(x: &PPoint) -> Vec<Matrix> {
    model::stabilizer_basis(x.member(), &x.blocks)
}

fn require_stable(pair: &DualPairSpec) -> Result<(), LiftError> {
    if pair.stable_range() {
        Ok(())
    } else {
        Err(LiftError::NotStableRange(pair.to_string()))
    }
}

/// Height of the new column: `size(G') - size(G)`.
pub fn column_height(pair: &DualPairSpec) -> usize {
    pair.side_member(Side::GPrime).size() - pair.side_member(Side::G).size()
}

/// Adds the column of height `size(G') - size(G)` in front of the diagram.
/// In the stable range the column is at least as tall as the diagram, so
/// every row grows by one box; the remaining boxes become rows of length one
/// whose signs make up the signature of `G'`. A row ending in `t` becomes a
/// row led by `-t`: with `x = phi(w)` and `x' = phi'(w)` in our coordinates,
/// `w` carries the chain of a row read from its last box, so the new box sits
/// in front of the reversed row (checked against the moment classifier in
/// every case and orientation).
pub fn lift_orbit(o: &Orbit) -> Result<Orbit, LiftError> {
    let pair = o.pair;
    require_stable(&pair)?;
    if o.side != Side::G {
        return Err(LiftError::WrongSide);
    }
    let target = pair.side_member(Side::GPrime);
    let c = column_height(&pair);
    let old = o.diagram.rows();
    debug_assert!(c >= old.len());
    let mut rows: Vec<Row> = Vec::with_capacity(c);
    for r in old {
        let lead = if target.is_complex() {
            Sign::Plus
        } else {
            r.last_sign().flip()
        };
        rows.push(Row::new(r.len + 1, lead));
    }
    let fresh = c - old.len();
    if target.is_complex() {
        rows.extend(std::iter::repeat_n(Row::new(1, Sign::Plus), fresh));
    } else {
        let plus_so_far: usize = rows.iter().map(|r| r.count(Sign::Plus)).sum();
        let need = target.signature().0.checked_sub(plus_so_far).filter(|&k| k <= fresh).ok_or_else(|| {
            OrbitError::Invalid { member: target.group_name(), reason: "lifted column cannot meet the signature".into() }
        })?;
        rows.extend(std::iter::repeat_n(Row::new(1, Sign::Plus), need));
        rows.extend(std::iter::repeat_n(Row::new(1, Sign::Minus), fresh - need));
    }
    Ok(Orbit::new(pair, Side::GPrime, SignedDiagram::new(rows))?)
}

/// The orbit of `phi'(w)` for the constructed `w` over the representative.
pub fn lift_orbit_by_moment(o: &Orbit) -> Result<Orbit, LiftError> {
    let sm = crate::moment::construct_w(o)?;
    Ok(classify(&sm.xprime)?)
}

pub fn lift_cycle(c: &Cycle) -> Result<Cycle, LiftError> {
    let terms = c.terms.iter().map(|(m, o)| Ok((*m, lift_orbit(o)?))).collect::<Result<Vec<_>, LiftError>>()?;
    Ok(Cycle::new(terms)?)
}

/// Partitions of the complexified group of `member`.
pub fn is_complex_partition(member: Member, parts: &[usize]) -> bool {
    if parts.iter().sum::<usize>() != member.size() || parts.contains(&0) || !parts.is_sorted_by(|a, b| a >= b) {
        return false;
    }
    let form = member.form();
    if form.layout == Layout::Free {
        return true;
    }
    // Sp: odd parts occur an even number of times; O: even parts do.
    let paired_parity = if form.eps == -1 { 1 } else { 0 };
    parts
        .iter()
        .filter(|&&l| l % 2 == paired_parity)
        .fold(std::collections::BTreeMap::<usize, usize>::new(), |mut m, &l| {
            *m.entry(l).or_default() += 1;
            m
        })
        .values()
        .all(|k| k % 2 == 0)
}

/// Column addition on underlying partitions, from side G to side G'.
pub fn lift_complex(parts: &[usize], pair: &DualPairSpec) -> Result<Vec<usize>, LiftError> {
    let g = pair.side_member(Side::G);
    if !is_complex_partition(g, parts) {
        return Err(LiftError::Partition(parts.to_vec(), g.group_name()));
    }
    let c = column_height(pair);
    if c < parts.len() {
        return Err(LiftError::NotStableRange(pair.to_string()));
    }
    let mut out: Vec<usize> = parts.iter().map(|l| l + 1).collect();
    out.extend(std::iter::repeat_n(1, c - parts.len()));
    let gp = pair.side_member(Side::GPrime);
    if !is_complex_partition(gp, &out) {
        return Err(LiftError::Partition(out, gp.group_name()));
    }
    Ok(out)
}

/// Coordinates of each `z` in `basis` (all inside the same subspace of operators).
fn coords_in(basis: &[Matrix], z: &Matrix) -> Result<Vec<Scalar>, LinError> {
    if basis.is_empty() {
        return if z.is_zero() { Ok(Vec::new()) } else { Err(LinError::NoSolution) };
    }
    let flat: Vec<Vec<Scalar>> = basis.iter().map(Matrix::flatten).collect();
    coordinates(&flat, &z.flatten())
}

/// Trace of `ad z` on the span of `basis` (which `z` must normalize).
fn ad_trace(basis: &[Matrix], z: &Matrix) -> Result<Scalar, LinError> {
    if basis.is_empty() {
        return Ok(Scalar::zero());
    }
    let span = SpanCoordinates::new(basis.iter().map(Matrix::flatten).collect())?;
    let mut t = Scalar::zero();
    for (i, b) in basis.iter().enumerate() {
        t += &span.coords(&z.commutator(b).flatten())?[i];
    }
    Ok(t)
}

/// `tr(ad z | k/k_x)` for `z` in `k_x`.
fn ad_trace_quotient(member: Member, k_x: &[Matrix], z: &Matrix) -> Result<Scalar, LinError> {
    Ok(ad_trace(&model::k_basis(member), z)? - ad_trace(k_x, z)?)
}

/// Derivative of `γ_x` on the basis of `k_x` at the representative:
/// `Z -> -tr(ad Z | k/k_x)`.
pub fn gamma_character(o: &Orbit) -> Result<Vec<Scalar>, LiftError> {
    gamma_at(&representative(o))
}

pub fn gamma_at(x: &PPoint) -> Result<Vec<Scalar>, LiftError> {
    let member = x.member();
    let k_x = stabilizer(x);
    k_x.iter().map(|z| Ok(-ad_trace_quotient(member, &k_x, z)?)).collect()
}

/// `tr(Z | W)` for `Z` in `k` of the member on `side`.
pub fn trace_on_w(pair: &DualPairSpec, side: Side, z: &Matrix) -> Scalar {
    let slot = pair.slot_of(side);
    model::w_operator(pair, |w| model::lie_on_w(pair, slot, z, w)).trace()
}

/// Derivative of `ς` at `Z`: `-tr(Z | W) / 2`.
pub fn varsigma_weight(pair: &DualPairSpec, side: Side, z: &Matrix) -> Scalar {
    -trace_on_w(pair, side, z).div(&Scalar::int(2))
}

/// `2 · weight = dγ_x` on `k_x`.
pub fn is_admissible(d: &OrbitDatum) -> Result<bool, LiftError> {
    let gamma = gamma_at(&d.rep)?;
    if gamma.len() != d.character.base_weight.len() {
        return Err(LiftError::Datum("weight length does not match k_x".into()));
    }
    let two = Scalar::int(2);
    Ok(d.character.base_weight.iter().zip(&gamma).all(|(w, g)| &(&two * w) == g))
}

/// Re-reads a point of side G' of `pair` on side G of `next`, whose smaller member is the same group.
fn rebase(x: &PPoint, next: &DualPairSpec) -> PPoint {
    PPoint::new(*next, Side::G, x.blocks.clone())
}

/// Carries the datum to the larger member. The new weight at `X'` is
/// `ς'(X') + ς(dα X') + χ(dα X')`.
pub fn lift_datum(d: &OrbitDatum) -> Result<OrbitDatum, LiftError> {
    let pair = d.orbit.pair;
    require_stable(&pair)?;
    if d.orbit.side != Side::G {
        return Err(LiftError::WrongSide);
    }
    let w = construct_w_at(&pair, &d.rep)?;
    let sm = stabilizer_map(&w)?;
    let orbit = classify(&sm.xprime)?;
    let mut weight = Vec::with_capacity(sm.kprime_xprime.len());
    for (j, xp) in sm.kprime_xprime.iter().enumerate() {
        let coeffs = sm.dalpha.col(j);
        let z = sm.k_x_element(&coeffs);
        let mut v = varsigma_weight(&pair, Side::GPrime, xp) + varsigma_weight(&pair, Side::G, &z);
        for (a, b) in coeffs.iter().zip(&d.character.base_weight) {
            v += &(a * b);
        }
        weight.push(v);
    }
    let mut twists = d.character.varsigma_twists.clone();
    twists.push(format!("varsigma_K'[{}]", pair.side_member(Side::GPrime).group_name()));
    twists.push(format!("varsigma_K[{}]", pair.side_member(Side::G).group_name()));
    let character = CharacterTag { base_weight: weight, dim: d.character.dim, varsigma_twists: twists, label: d.character.label.clone() };
    Ok(OrbitDatum { orbit, rep: sm.xprime, character })
}

/// Applies the Chevalley involution `C` to the orbit, the point and the weight
/// (the new weight is `χ ∘ C` on `k_{C(x)} = C(k_x)`).
pub fn chevalley_datum(d: &OrbitDatum) -> Result<OrbitDatum, LiftError> {
    let member = d.rep.member();
    let rep = chevalley_point(&d.rep);
    let orbit = classify(&rep)?;
    let old = stabilizer(&d.rep);
    let new = stabilizer(&rep);
    let mut weight = Vec::with_capacity(new.len());
    for z in &new {
        let c = coords_in(&old, &chevalley_lie(member, z))?;
        let mut v = Scalar::zero();
        for (a, b) in c.iter().zip(&d.character.base_weight) {
            v += &(a * b);
        }
        weight.push(v);
    }
    let character = CharacterTag { base_weight: weight, ..d.character.clone() };
    Ok(OrbitDatum { orbit, rep, character })
}

/// Maximal elements of `{θ(O_j)}`: the lift of a union of closures.
pub fn av_upper_bound(av: &[Orbit]) -> Result<Vec<Orbit>, LiftError> {
    let mut lifted: Vec<Orbit> = Vec::new();
    for o in av {
        let l = lift_orbit(o)?;
        if !lifted.contains(&l) {
            lifted.push(l);
        }
    }
    let mut out = Vec::new();
    for (i, a) in lifted.iter().enumerate() {
        let mut dominated = false;
        for (j, b) in lifted.iter().enumerate() {
            if i != j && closure_leq(a, b)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            out.push(a.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentRow {
    pub lhs: Scalar,
    pub ad_part: Scalar,
    pub w_part: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentReport {
    pub pair: String,
    pub orbit: String,
    pub rows: Vec<TangentRow>,
    pub passed: bool,
    pub counterexample: Option<usize>,
}

/// For each basis element `X'` of `k'_{x'}`:
/// `tr(ad X' | k'/k'_{x'}) = tr(ad dα X' | k/k_x) + tr(X' | W) + tr(dα X' | W)`.
pub fn tangent_identity_check(o: &Orbit) -> Result<TangentReport, LiftError> {
    require_stable(&o.pair)?;
    let sm = crate::moment::construct_w(o)?;
    tangent_identity_at(&sm, &o.to_string())
}

pub fn tangent_identity_at(sm: &StabilizerMap, orbit: &str) -> Result<TangentReport, LiftError> {
    let pair = sm.w.pair;
    let (g, gp) = (pair.side_member(Side::G), pair.side_member(Side::GPrime));
    let mut rows = Vec::new();
    let mut counterexample = None;
    for (j, xp) in sm.kprime_xprime.iter().enumerate() {
        let z = sm.dalpha_of(j);
        let lhs = ad_trace_quotient(gp, &sm.kprime_xprime, xp)?;
        let ad_part = ad_trace_quotient(g, &sm.k_x, &z)?;
        let w_part = trace_on_w(&pair, Side::GPrime, xp) + trace_on_w(&pair, Side::G, &z);
        if lhs != &ad_part + &w_part && counterexample.is_none() {
            counterexample = Some(j);
        }
        rows.push(TangentRow { lhs, ad_part, w_part });
    }
    Ok(TangentReport {
        pair: pair.to_string(),
        orbit: orbit.to_string(),
        passed: counterexample.is_none(),
        rows,
        counterexample,
    })
}

/// `d_{k+1} = lift_datum(chevalley_datum(d_k))`, each step checked for admissibility.
pub fn tower(pairs: &[DualPairSpec], d0: &OrbitDatum) -> Result<Vec<OrbitDatum>, LiftError> {
    let mut out = vec![d0.clone()];
    if pairs.is_empty() {
        return Ok(out);
    }
    if d0.orbit.pair != pairs[0] || d0.orbit.side != Side::G || !d0.orbit.is_zero() {
        return Err(LiftError::Chain(0, "initial datum must be the zero orbit on the first smaller member".into()));
    }
    if !is_admissible(d0)? {
        return Err(LiftError::NotAdmissible(0));
    }
    for (k, pair) in pairs.iter().enumerate() {
        if !pair.stable_range() {
            return Err(LiftError::Chain(k, format!("{pair} is not in the stable range")));
        }
        if pair.excluded_ddagger() {
            return Err(LiftError::Chain(k, format!("{pair} is excluded")));
        }
        if k > 0 && pairs[k - 1].side_member(Side::GPrime) != pair.side_member(Side::G) {
            return Err(LiftError::Chain(k, format!("{} does not start from the previous larger member", pair)));
        }
        let prev = out.last().expect("nonempty");
        let here = if k == 0 {
            prev.clone()
        } else {
            let rep = rebase(&prev.rep, pair);
            OrbitDatum { orbit: classify(&rep)?, rep, character: prev.character.clone() }
        };
        let next = lift_datum(&chevalley_datum(&here)?)?;
        if !is_admissible(&next)? {
            return Err(LiftError::NotAdmissible(k + 1));
        }
        out.push(next);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct DatumLiteral {
    orbit: String,
    #[serde(default = "one")]
    dim: usize,
    #[serde(default)]
    weight: Option<Vec<serde_json::Value>>,
    #[serde(default)]
    label: String,
}

fn one() -> usize {
    1
}

/// Quotes bare keys so that `{orbit: "+-", dim: 1}` reads as JSON.
fn quote_keys(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 16);
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut in_str = false;
    while i < chars.len() {
        let ch = chars[i];
        if in_str {
            out.push(ch);
            if ch == '\\' && i + 1 < chars.len() {
                out.push(chars[i + 1]);
                i += 1;
            } else if ch == '"' {
                in_str = false;
            }
        } else if ch == '"' {
            in_str = true;
            out.push(ch);
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let mut k = i;
            while k < chars.len() && chars[k].is_whitespace() {
                k += 1;
            }
            if k < chars.len() && chars[k] == ':' {
                out.push('"');
                out.push_str(&word);
                out.push('"');
            } else {
                out.push_str(&word);
            }
            continue;
        } else {
            out.push(ch);
        }
        i += 1;
    }
    out
}

/// Parses `{orbit: "<diagram>", dim: k, weight: [..], label: ".."}` (plain JSON also works).
/// Weight entries are numbers or strings such as `"-1/2"`; a missing weight means zero.
pub fn parse_datum(pair: DualPairSpec, side: Side, text: &str) -> Result<OrbitDatum, LiftError> {
    let lit: DatumLiteral =
        serde_json::from_str(&quote_keys(text)).map_err(|e| LiftError::Datum(e.to_string()))?;
    let orbit = Orbit::parse(pair, side, &lit.orbit)?;
    let weight = match lit.weight {
        None => {
            let mut d = OrbitDatum::trivial(orbit);
            d.character.dim = lit.dim;
            d.character.label = lit.label;
            if lit.dim == 0 {
                return Err(LiftError::Datum("dim must be positive".into()));
            }
            return Ok(d);
        }
        Some(ws) => ws
            .iter()
            .map(|v| {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(LiftError::Datum(format!("bad weight entry {other}"))),
                };
                s.parse::<Scalar>().map_err(|e| LiftError::Datum(format!("{s}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    OrbitDatum::new(orbit, weight, lit.dim, &lit.label)
}
