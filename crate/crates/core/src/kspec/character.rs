//! Characters of (possibly disconnected) products of classical groups.
//!
//! A character is stored as its restriction to the maximal torus, plus for every
//! nonempty set `S` of O-factors the trace of `r_S t`, where `r_f` is `-I` on
//! odd orthogonal factors and a reflection on even ones. For `f` in `S` with
//! `f` an even orthogonal factor, only `t` centralizing `r_f` matters; its last
//! coordinate is 0.
//! These traces separate the two parities of each O-factor irreducible.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::pairs::FactorKind;

use super::irreps::reflection_trace;
use super::roots::{dimension, irreducible_character, Laurent, RootType};
use super::KspecError;

/// How the twisting element of an O-factor acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    /// `-I`: central, weights unchanged.
    Central,
    /// Reflection of `O(2m)`: negates the factor's last torus coordinate.
    Reflection,
}

/// A product of classical groups, as a list of factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KGroup {
    pub factors: Vec<FactorKind>,
    #[serde(skip)]
    types: Vec<RootType>,
    #[serde(skip)]
    offsets: Vec<usize>,
}

impl KGroup {
    pub fn new(factors: Vec<FactorKind>) -> Result<Self, KspecError> {
        let types = factors.iter().map(|&f| RootType::of(f)).collect::<Result<Vec<_>, _>>()?;
        let mut offsets = Vec::with_capacity(types.len() + 1);
        let mut off = 0;
        for t in &types {
            offsets.push(off);
            off += t.rank();
        }
        offsets.push(off);
        Ok(KGroup { factors, types, offsets })
    }

    pub fn product(&self, other: &KGroup) -> KGroup {
        let mut f = self.factors.clone();
        f.extend(other.factors.iter().copied());
        KGroup::new(f).expect("factors already validated")
    }

    pub fn rank(&self) -> usize {
        *self.offsets.last().expect("offsets")
    }

    pub fn root_type(&self, f: usize) -> RootType {
        self.types[f]
    }

    pub fn coords(&self, f: usize) -> std::ops::Range<usize> {
        self.offsets[f]..self.offsets[f + 1]
    }

    /// O-factors, in factor order; bit `b` of a mask refers to the `b`-th entry.
    pub fn twistables(&self) -> Vec<(usize, Twist)> {
        self.factors
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match f {
                FactorKind::O(0) => None,
                FactorKind::O(a) if a % 2 == 0 => Some((i, Twist::Reflection)),
                FactorKind::O(_) => Some((i, Twist::Central)),
                _ => None,
            })
            .collect()
    }

    pub fn masks(&self) -> u32 {
        1 << self.twistables().len()
    }

    /// Torus coordinates forced to 0 by a mask.
    fn frozen(&self, mask: u32) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, (f, t)) in self.twistables().into_iter().enumerate() {
            if mask >> b & 1 == 1 && t == Twist::Reflection {
                out.push(self.coords(f).end - 1);
            }
        }
        out
    }
}

/// Irreducible of a product group: concatenated highest weights, and for each
/// O-factor whose parity is not determined by the highest weight, the parity
/// (0 for the trivial-type member, 1 for its twist by `det`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Irrep {
    pub weight: Vec<i32>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parity: Vec<(usize, u8)>,
}

impl Irrep {
    pub fn trivial(g: &KGroup) -> Irrep {
        let parity = g.twistables().into_iter().map(|(f, _)| (f, 0)).collect();
        Irrep { weight: vec![0; g.rank()], parity }
    }

    pub fn part(&self, g: &KGroup, f: usize) -> Vec<i32> {
        self.weight[g.coords(f)].to_vec()
    }

    pub fn parity_of(&self, f: usize) -> Option<u8> {
        self.parity.iter().find(|(i, _)| *i == f).map(|(_, p)| *p)
    }

    pub fn dim(&self, g: &KGroup) -> i64 {
        (0..g.factors.len()).map(|f| dimension(g.root_type(f), &self.part(g, f))).product()
    }

    /// Contragredient. GL highest weights reverse and negate; the other factors
    /// here are self-dual.
    pub fn dual(&self, g: &KGroup) -> Irrep {
        let mut w = self.weight.clone();
        for f in 0..g.factors.len() {
            if let RootType::A(_) = g.root_type(f) {
                let r = g.coords(f);
                let part: Vec<i32> = w[r.clone()].iter().rev().map(|x| -x).collect();
                w[r].copy_from_slice(&part);
            }
        }
        Irrep { weight: w, parity: self.parity.clone() }
    }

    /// Restriction to the first `g1` factors of `g1 x g2`.
    pub fn split(&self, g1: &KGroup, g2: &KGroup) -> (Irrep, Irrep) {
        let n1 = g1.factors.len();
        let r = g1.rank();
        let a = Irrep {
            weight: self.weight[..r].to_vec(),
            parity: self.parity.iter().filter(|(f, _)| *f < n1).copied().collect(),
        };
        let b = Irrep {
            weight: self.weight[r..].to_vec(),
            parity: self.parity.iter().filter(|(f, _)| *f >= n1).map(|(f, p)| (f - n1, *p)).collect(),
        };
        let _ = g2;
        (a, b)
    }
}

/// Factors of `g` where the highest weight leaves the parity open.
fn open_factors(g: &KGroup, weight: &[i32]) -> Vec<(usize, usize)> {
    g.twistables()
        .into_iter()
        .enumerate()
        .filter(|(_, (f, t))| *t == Twist::Central || weight[g.coords(*f).end - 1] == 0)
        .map(|(b, (f, _))| (b, f))
        .collect()
}

/// Twined characters, indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub traces: BTreeMap<u32, Laurent>,
}

fn add_into(target: &mut Laurent, src: &Laurent, c: i64) {
    if c == 0 {
        return;
    }
    for (w, m) in src {
        let e = target.entry(w.clone()).or_insert(0);
        *e += c * m;
        if *e == 0 {
            target.remove(w);
        }
    }
}

fn mul_laurent(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (wa, ma) in a {
        for (wb, mb) in b {
            let w: Vec<i32> = wa.iter().zip(wb).map(|(x, y)| x + y).collect();
            *out.entry(w).or_insert(0) += ma * mb;
        }
    }
    out.retain(|_, m| *m != 0);
    out
}

impl Character {
    pub fn zero() -> Self {
        Character { traces: BTreeMap::new() }
    }

    pub fn get(&self, mask: u32) -> Option<&Laurent> {
        self.traces.get(&mask)
    }

    pub fn add_scaled(&mut self, o: &Character, c: i64) {
        for (mask, l) in &o.traces {
            add_into(self.traces.entry(*mask).or_default(), l, c);
        }
    }

    pub fn mul(&self, o: &Character) -> Character {
        let mut traces = BTreeMap::new();
        for (mask, a) in &self.traces {
            if let Some(b) = o.traces.get(mask) {
                traces.insert(*mask, mul_laurent(a, b));
            }
        }
        Character { traces }
    }

    /// Character of the contragredient: weights negate, traces of the
    /// involutions stay real and unchanged.
    pub fn dual(&self) -> Character {
        let traces = self
            .traces
            .iter()
            .map(|(m, l)| (*m, l.iter().map(|(w, c)| (w.iter().map(|x| -x).collect(), *c)).collect()))
            .collect();
        Character { traces }
    }

    pub fn dim(&self) -> i64 {
        self.traces.get(&0).map_or(0, |l| l.values().sum())
    }

    /// Character of `g1 x g2` from characters of the factors (external tensor product).
    pub fn external(g1: &KGroup, a: &Character, g2: &KGroup, b: &Character) -> Character {
        let t1 = g1.twistables().len();
        let t2 = g2.twistables().len();
        let mut traces = BTreeMap::new();
        for m1 in 0..(1u32 << t1) {
            for m2 in 0..(1u32 << t2) {
                let (Some(la), Some(lb)) = (a.traces.get(&m1), b.traces.get(&m2)) else { continue };
                let mut out = Laurent::new();
                for (wa, ca) in la {
                    for (wb, cb) in lb {
                        let mut w = wa.clone();
                        w.extend_from_slice(wb);
                        *out.entry(w).or_insert(0) += ca * cb;
                    }
                }
                traces.insert(m1 | (m2 << t1), out);
            }
        }
        Character { traces }
    }

    /// Restriction of a character of `g1` to `g1 x g2`, trivial on `g2`.
    pub fn inflate(g1: &KGroup, a: &Character, g2: &KGroup) -> Character {
        let triv = irrep_character(g2, &Irrep::trivial(g2));
        Character::external(g1, a, g2, &triv)
    }
}

/// Highest-weight part of the twined character, without the parity signs.
fn base_twined(g: &KGroup, weight: &[i32], mask: u32) -> Option<(Laurent, i64)> {
    let tw = g.twistables();
    let mut out: Laurent = [(Vec::new(), 1i64)].into_iter().collect();
    let mut lead = 1i64;
    for f in 0..g.factors.len() {
        let part = &weight[g.coords(f)];
        let twisted = tw.iter().position(|(i, _)| *i == f).filter(|b| mask >> b & 1 == 1);
        let t = g.root_type(f);
        let factor: Laurent = match (twisted, tw.iter().find(|(i, _)| *i == f).map(|x| x.1)) {
            (Some(_), Some(Twist::Reflection)) => {
                if part[part.len() - 1] != 0 {
                    return None;
                }
                match t {
                    RootType::D(_) => reflection_trace(g.factors[f], part),
                    _ => [(vec![0], 1)].into_iter().collect(),
                }
            }
            (Some(_), Some(Twist::Central)) => {
                let s: i32 = part.iter().sum();
                let sign = if s % 2 == 0 { 1 } else { -1 };
                lead *= sign;
                irreducible_character(t, part).into_iter().map(|(w, c)| (w, sign * c)).collect()
            }
            _ => irreducible_character(t, part),
        };
        let mut next = Laurent::new();
        for (wa, ca) in &out {
            for (wb, cb) in &factor {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                *next.entry(w).or_insert(0) += ca * cb;
            }
        }
        out = next;
    }
    Some((out, lead))
}

/// Full twined character of an irreducible.
pub fn irrep_character(g: &KGroup, irr: &Irrep) -> Character {
    let tw = g.twistables();
    let mut traces = BTreeMap::new();
    for mask in 0..g.masks() {
        let Some((mut l, _)) = base_twined(g, &irr.weight, mask) else {
            traces.insert(mask, Laurent::new());
            continue;
        };
        let mut sign = 1;
        for (b, (f, _)) in tw.iter().enumerate() {
            if mask >> b & 1 == 1 && irr.parity_of(*f) == Some(1) {
                sign = -sign;
            }
        }
        if sign < 0 {
            l.values_mut().for_each(|c| *c = -*c);
        }
        traces.insert(mask, l);
    }
    Character { traces }
}

/// Peels lex-maximal weights off a twined trace; returns highest weight -> coefficient.
fn strip(g: &KGroup, mut l: Laurent, mask: u32) -> Result<BTreeMap<Vec<i32>, i64>, KspecError> {
    let frozen = g.frozen(mask);
    let mut out = BTreeMap::new();
    l.retain(|_, c| *c != 0);
    while let Some((top, &c)) = l.last_key_value() {
        let top = top.clone();
        if frozen.iter().any(|&i| top[i] != 0) {
            return Err(KspecError::Decomposition(format!("mask {mask}: weight {top:?} off the fixed torus")));
        }
        for f in 0..g.factors.len() {
            if !g.root_type(f).is_dominant(&top[g.coords(f)]) {
                return Err(KspecError::Decomposition(format!("mask {mask}: top weight {top:?} is not dominant")));
            }
        }
        let (chi, lead) = base_twined(g, &top, mask).expect("frozen coordinates are zero");
        let d = c * lead;
        add_into(&mut l, &chi, -d);
        if l.get(&top).is_some() {
            return Err(KspecError::Decomposition(format!("leading weight {top:?} did not cancel")));
        }
        out.insert(top, d);
    }
    Ok(out)
}

/// Multiplicities of irreducibles in a character.
pub fn decompose(g: &KGroup, ch: &Character) -> Result<BTreeMap<Irrep, i64>, KspecError> {
    let empty = Laurent::new();
    let base = strip(g, ch.traces.get(&0).cloned().unwrap_or_default(), 0)?;
    let mut by_mask: BTreeMap<u32, BTreeMap<Vec<i32>, i64>> = BTreeMap::new();
    for mask in 1..g.masks() {
        by_mask.insert(mask, strip(g, ch.traces.get(&mask).unwrap_or(&empty).clone(), mask)?);
    }
    let mut out = BTreeMap::new();
    for (lambda, total) in base {
        if total < 0 {
            return Err(KspecError::Decomposition(format!("negative multiplicity at {lambda:?}")));
        }
        let open = open_factors(g, &lambda);
        let k = open.len();
        // d_S for S inside the open set, then Fourier inversion over (Z/2)^k.
        let d: Vec<i64> = (0u32..(1 << k))
            .map(|sub| {
                let mask: u32 = (0..k).filter(|j| sub >> j & 1 == 1).map(|j| 1u32 << open[j].0).sum();
                if mask == 0 {
                    total
                } else {
                    by_mask[&mask].get(&lambda).copied().unwrap_or(0)
                }
            })
            .collect();
        for eps in 0u32..(1 << k) {
            let mut acc = 0i64;
            for (sub, ds) in d.iter().enumerate() {
                let odd = (sub as u32 & eps).count_ones() % 2 == 1;
                acc += if odd { -ds } else { *ds };
            }
            if acc % (1 << k) != 0 || acc < 0 {
                return Err(KspecError::Decomposition(format!("parity split of {lambda:?} is not a count: {acc}")));
            }
            let m = acc >> k;
            if m != 0 {
                let parity = (0..k).map(|j| (open[j].1, (eps >> j & 1) as u8)).collect();
                out.insert(Irrep { weight: lambda.clone(), parity }, m);
            }
        }
    }
    Ok(out)
}

/// Character from multiplicities.
pub fn recompose(g: &KGroup, parts: &BTreeMap<Irrep, i64>) -> Character {
    let mut out = Character::zero();
    for mask in 0..g.masks() {
        out.traces.insert(mask, Laurent::new());
    }
    for (irr, m) in parts {
        out.add_scaled(&irrep_character(g, irr), *m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o2o2() -> KGroup {
        KGroup::new(vec![FactorKind::O(2), FactorKind::O(2)]).unwrap()
    }

    #[test]
    fn decompose_recovers_parities() {
        let g = KGroup::new(vec![FactorKind::O(3), FactorKind::O(2), FactorKind::GL(2), FactorKind::O(1)]).unwrap();
        let mut parts = BTreeMap::new();
        parts.insert(Irrep { weight: vec![1, 0, 2, 0], parity: vec![(0, 1), (1, 0), (3, 1)] }, 2);
        parts.insert(Irrep { weight: vec![1, 0, 2, 0], parity: vec![(0, 0), (1, 1), (3, 1)] }, 1);
        parts.insert(Irrep { weight: vec![0, 3, 1, -1], parity: vec![(0, 0), (3, 0)] }, 3);
        let ch = recompose(&g, &parts);
        assert_eq!(decompose(&g, &ch).unwrap(), parts);
    }

    #[test]
    fn o2_tensor_square() {
        // sigma_1 (x) sigma_1 = triv + det + sigma_2 for O(2).
        let g = KGroup::new(vec![FactorKind::O(2)]).unwrap();
        let s1 = irrep_character(&g, &Irrep { weight: vec![1], parity: vec![] });
        let sq = decompose(&g, &s1.mul(&s1)).unwrap();
        assert_eq!(sq.len(), 3);
        assert_eq!(sq[&Irrep { weight: vec![0], parity: vec![(0, 1)] }], 1);
        assert_eq!(sq[&Irrep { weight: vec![0], parity: vec![(0, 0)] }], 1);
        assert_eq!(sq[&Irrep { weight: vec![2], parity: vec![] }], 1);
    }

    #[test]
    fn external_and_split() {
        let g = o2o2();
        let one = KGroup::new(vec![FactorKind::O(2)]).unwrap();
        let a = irrep_character(&one, &Irrep { weight: vec![0], parity: vec![(0, 1)] });
        let b = irrep_character(&one, &Irrep { weight: vec![3], parity: vec![] });
        let ab = decompose(&g, &Character::external(&one, &a, &one, &b)).unwrap();
        let (irr, m) = ab.into_iter().next().unwrap();
        assert_eq!(m, 1);
        let (x, y) = irr.split(&one, &one);
        assert_eq!(x, Irrep { weight: vec![0], parity: vec![(0, 1)] });
        assert_eq!(y.weight, vec![3]);
    }

    #[test]
    fn o4_parities() {
        // Lambda^2 C^4 is irreducible for O(4); (C^4)^{(x)2} = triv + S^2_0 + Lambda^2.
        let g = KGroup::new(vec![FactorKind::O(4)]).unwrap();
        let v = irrep_character(&g, &Irrep { weight: vec![1, 0], parity: vec![(0, 0)] });
        let sq = decompose(&g, &v.mul(&v)).unwrap();
        let expect: BTreeMap<Irrep, i64> = [
            (Irrep { weight: vec![0, 0], parity: vec![(0, 0)] }, 1),
            (Irrep { weight: vec![1, 1], parity: vec![] }, 1),
            (Irrep { weight: vec![2, 0], parity: vec![(0, 0)] }, 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(sq, expect);
        let parts: BTreeMap<Irrep, i64> = [
            (Irrep { weight: vec![2, 0], parity: vec![(0, 1)] }, 2),
            (Irrep { weight: vec![1, 0], parity: vec![(0, 0)] }, 1),
            (Irrep { weight: vec![2, 2], parity: vec![] }, 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(decompose(&g, &recompose(&g, &parts)).unwrap(), parts);
    }

    #[test]
    fn gl_dual() {
        let g = KGroup::new(vec![FactorKind::GL(3)]).unwrap();
        let v = Irrep { weight: vec![2, 1, -1], parity: vec![] };
        let dual = decompose(&g, &irrep_character(&g, &v).dual()).unwrap();
        assert_eq!(dual.keys().next().unwrap(), &v.dual(&g));
        assert_eq!(v.dual(&g).weight, vec![1, -1, -2]);
    }
}
