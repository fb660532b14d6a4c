//! Graded `K`-types: polynomials on `W` and `p*`, harmonics, the transfer of a
//! graded `K`-module to `K'`, and `K`-types of orbit-closure rings.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::exactlin::{det, Matrix, Scalar};
use crate::lift::{lift_datum, OrbitDatum};
use crate::model;
use crate::moment::construct_w;
use crate::orbits::{representative, Orbit};
use crate::pairs::{DualPairSpec, FactorKind, Member, Side};

use super::character::{decompose, recompose, Character, Irrep, KGroup};
use super::frame::{k_group, p_frame, twisting_elements, w_frame, Frame};
use super::modp::{self, Echelon};
use super::roots::Laurent;
use super::KspecError;

/// A graded module for a product group, degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSeries {
    pub group: KGroup,
    pub degrees: Vec<BTreeMap<Irrep, i64>>,
}

impl KSeries {
    pub fn dims(&self) -> Vec<i64> {
        self.degrees.iter().map(|d| d.iter().map(|(i, m)| i.dim(&self.group) * m).sum()).collect()
    }

    pub fn mult(&self, d: usize, irr: &Irrep) -> i64 {
        self.degrees.get(d).and_then(|t| t.get(irr)).copied().unwrap_or(0)
    }

    pub fn truncate(&self, max_deg: usize) -> KSeries {
        KSeries { group: self.group.clone(), degrees: self.degrees.iter().take(max_deg + 1).cloned().collect() }
    }

    pub fn group_name(&self) -> String {
        self.group.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("x")
    }

    pub fn to_json(&self) -> Value {
        let degrees: Vec<Value> = self
            .degrees
            .iter()
            .enumerate()
            .map(|(d, terms)| {
                let terms: Vec<Value> = terms
                    .iter()
                    .map(|(irr, m)| {
                        let mut t = json!({ "weight": irr.weight, "mult": m });
                        if !irr.parity.is_empty() {
                            t["parity"] = json!(irr.parity);
                        }
                        t
                    })
                    .collect();
                json!({ "d": d, "terms": terms })
            })
            .collect();
        json!({ "group": self.group_name(), "degrees": degrees })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("group {}\n", self.group_name());
        for (d, terms) in self.degrees.iter().enumerate() {
            let parts: Vec<String> = terms
                .iter()
                .map(|(irr, m)| {
                    let par: String = irr.parity.iter().map(|(f, p)| format!(" {f}:{}", if *p == 0 { '+' } else { '-' })).collect();
                    format!("{m}x{:?}{par}", irr.weight)
                })
                .collect();
            out.push_str(&format!("d={d} dim={}: {}\n", self.dims()[d], parts.join(", ")));
        }
        out
    }
}

/// Twined characters of `S^d(U*)`, `d <= max_deg`, with function weights.
pub fn symmetric_characters(frame: &Frame, max_deg: usize) -> Vec<Character> {
    let n = frame.dim();
    let rank = frame.group.rank();
    let mut out = vec![Character::zero(); max_deg + 1];
    for mask in 0..frame.group.masks() {
        let t = frame.twist_of_mask(mask);
        // (weight, sign, degree) of the generators of the fixed monomials.
        let mut gens: Vec<(Vec<i32>, i64, usize)> = Vec::new();
        for k in 0..n {
            let j = t.perm[k];
            let neg = |w: &Vec<i32>| w.iter().map(|x| -x).collect::<Vec<i32>>();
            if j == k {
                gens.push((neg(&frame.weights[k]), t.sign[k] as i64, 1));
            } else if k < j {
                let w: Vec<i32> = frame.weights[k].iter().zip(&frame.weights[j]).map(|(a, b)| -a - b).collect();
                gens.push((w, 1, 2));
            }
        }
        let mut series: Vec<Laurent> = vec![Laurent::new(); max_deg + 1];
        series[0].insert(vec![0; rank], 1);
        for (w, s, deg) in gens {
            for d in deg..=max_deg {
                let prev: Vec<(Vec<i32>, i64)> = series[d - deg].iter().map(|(a, b)| (a.clone(), *b)).collect();
                for (v, c) in prev {
                    let key: Vec<i32> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
                    let e = series[d].entry(key.clone()).or_insert(0);
                    *e += s * c;
                    if *e == 0 {
                        series[d].remove(&key);
                    }
                }
            }
        }
        for (d, l) in series.into_iter().enumerate() {
            out[d].traces.insert(mask, l);
        }
    }
    out
}

fn decompose_all(group: &KGroup, chars: &[Character]) -> Result<KSeries, KspecError> {
    let degrees = chars.iter().map(|c| decompose(group, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(KSeries { group: group.clone(), degrees })
}

/// `C[W]` as a graded `K x K'`-module (side `G` factors first).
pub fn cw_series(pair: &DualPairSpec, max_deg: usize) -> Result<KSeries, KspecError> {
    let frame = w_frame(pair)?;
    decompose_all(&frame.group, &symmetric_characters(&frame, max_deg))
}

/// `C[p*] = S(p)` for one member, graded by polynomial degree.
pub fn sp_series(member: Member, max_deg: usize) -> Result<KSeries, KspecError> {
    let frame = p_frame(member)?;
    decompose_all(&frame.group, &symmetric_characters(&frame, max_deg))
}

/// Harmonics `H` for the `K'`-invariants: `C[W] = S(p) (x) H` as graded
/// `K x K'`-modules, with `S^j(p)` in `W`-degree `2j`.
pub fn harmonic_characters(pair: &DualPairSpec, max_w_deg: usize) -> Result<(KGroup, Vec<Character>), KspecError> {
    let wf = w_frame(pair)?;
    let g = pair.side_member(Side::G);
    let pf = p_frame(g)?;
    let kprime = k_group(pair.side_member(Side::GPrime))?;
    let cw = symmetric_characters(&wf, max_w_deg);
    let sp: Vec<Character> = symmetric_characters(&pf, max_w_deg / 2)
        .iter()
        .map(|c| Character::inflate(&pf.group, c, &kprime))
        .collect();
    let mut h: Vec<Character> = Vec::with_capacity(max_w_deg + 1);
    for d in 0..=max_w_deg {
        let mut c = cw[d].clone();
        for j in 1..=d / 2 {
            c.add_scaled(&sp[j].mul(&h[d - 2 * j]), -1);
        }
        h.push(c);
    }
    Ok((wf.group, h))
}

/// Harmonics decomposed into `(sigma, sigma')` pairs.
#[derive(Clone, Debug)]
pub struct Harmonics {
    pub k: KGroup,
    pub kprime: KGroup,
    pub degrees: Vec<BTreeMap<(Irrep, Irrep), i64>>,
}

pub fn harmonics(pair: &DualPairSpec, max_w_deg: usize) -> Result<Harmonics, KspecError> {
    let (group, chars) = harmonic_characters(pair, max_w_deg)?;
    let k = k_group(pair.side_member(Side::G))?;
    let kprime = k_group(pair.side_member(Side::GPrime))?;
    let mut degrees = Vec::new();
    for c in &chars {
        let mut terms = BTreeMap::new();
        for (irr, m) in decompose(&group, c)? {
            if m < 0 {
                return Err(KspecError::Decomposition(format!("harmonics have negative multiplicity at {irr:?}")));
            }
            terms.insert(irr.split(&k, &kprime), m);
        }
        degrees.push(terms);
    }
    Ok(Harmonics { k, kprime, degrees })
}

/// `B_b = sum over a + h/2 = b of (A_a (x) H_h)^K`, as `K'`-types.
pub fn transfer_with(h: &Harmonics, a: &KSeries, max_deg: usize) -> KSeries {
    let mut degrees = vec![BTreeMap::new(); max_deg + 1];
    for (hd, terms) in h.degrees.iter().enumerate() {
        if hd % 2 == 1 {
            continue;
        }
        for ((sigma, sigma_p), m) in terms {
            let dual = sigma.dual(&h.k);
            for (ad, a_terms) in a.degrees.iter().enumerate() {
                let b = ad + hd / 2;
                if b > max_deg {
                    continue;
                }
                if let Some(c) = a_terms.get(&dual) {
                    *degrees[b].entry(sigma_p.clone()).or_insert(0) += c * m;
                }
            }
        }
    }
    KSeries { group: h.kprime.clone(), degrees }
}

fn require_stable(pair: &DualPairSpec) -> Result<(), KspecError> {
    if pair.stable_range() {
        Ok(())
    } else {
        Err(KspecError::NotStableRange(pair.to_string()))
    }
}

/// Transfer of a graded `K`-module to a graded `K'`-module through the harmonics.
pub fn transfer_series(pair: &DualPairSpec, a: &KSeries, max_deg: usize) -> Result<KSeries, KspecError> {
    require_stable(pair)?;
    let h = harmonics(pair, 2 * max_deg)?;
    if a.group != h.k {
        return Err(KspecError::Decomposition(format!("input is a {} series, expected {:?}", a.group_name(), h.k.factors)));
    }
    Ok(transfer_with(&h, a, max_deg))
}

/// Multiplicity of `sigma'` in the transfer of `a` up to `max_deg`, computed
/// twice: from the transferred series, and by pairing the harmonics against
/// the contragredient of `a` (dualized at the level of characters).
pub fn p4_multiplicity_check(pair: &DualPairSpec, a: &KSeries, sigma_p: &Irrep, max_deg: usize) -> Result<(i64, i64), KspecError> {
    require_stable(pair)?;
    let h = harmonics(pair, 2 * max_deg)?;
    let b = transfer_with(&h, a, max_deg);
    let lhs: i64 = (0..=max_deg).map(|d| b.mult(d, sigma_p)).sum();
    let duals: Vec<BTreeMap<Irrep, i64>> = a
        .degrees
        .iter()
        .map(|t| decompose(&a.group, &recompose(&a.group, t).dual()))
        .collect::<Result<_, _>>()?;
    let mut rhs = 0;
    for (hd, terms) in h.degrees.iter().enumerate().step_by(2) {
        for ((sigma, sp), m) in terms {
            if sp != sigma_p {
                continue;
            }
            for ad in 0..=max_deg.saturating_sub(hd / 2) {
                if ad + hd / 2 <= max_deg {
                    rhs += m * duals.get(ad).and_then(|t| t.get(sigma)).copied().unwrap_or(0);
                }
            }
        }
    }
    Ok((lhs, rhs))
}

/// Seeded points of a subvariety of `p*`, in frame coordinates mod `p`.
struct PointPool<'a> {
    frame: &'a Frame,
    member: Member,
    base: Option<Vec<Matrix>>,
    rng: ChaCha8Rng,
    twists: Vec<Matrix>,
    drawn: usize,
    points: Vec<Vec<u64>>,
}


impl<'a> PointPool<'a> {
    fn new(frame: &'a Frame, member: Member, base: Option<Vec<Matrix>>, seed: u64) -> Self {
        let twists = twisting_elements(member);
        PointPool { frame, member, base, rng: ChaCha8Rng::seed_from_u64(seed), twists, drawn: 0, points: Vec::new() }
    }

    fn sample(&mut self) -> Vec<Scalar> {
        let d = self.member.dim_p();
        match &self.base {
            None => (0..d).map(|_| Scalar::gauss(self.rng.gen_range(-50..=50), self.rng.gen_range(-50..=50))).collect(),
            Some(blocks) => {
                // Nilpotent orbits are conical, so a random scalar keeps us on the orbit.
                let mut g = model::random_k_element(self.member, &mut self.rng);
                for _ in 0..2 {
                    g = g.mul(&model::random_k_element(self.member, &mut self.rng));
                }
                // Visit the components of K_C in turn: orbit closures may be reducible.
                let target = self.drawn as u32;
                self.drawn += 1;
                let o_factors = self.member.factors().into_iter().filter(|f| matches!(f.kind, FactorKind::O(a) if a > 0));
                for (b, (f, r)) in o_factors.zip(&self.twists).enumerate() {
                    let negative = det(&model::factor_part(&f, &g)) != Scalar::one();
                    if negative != (target >> b & 1 == 1) {
                        g = g.mul(r);
                    }
                }
                let c = Scalar::gauss(self.rng.gen_range(1..=997), self.rng.gen_range(-997..=997));
                let x = model::group_on_p(self.member, &g, blocks);
                model::p_coords(self.member, &x).iter().map(|v| v * &c).collect()
            }
        }
    }

    fn get(&mut self, i: usize) -> &[u64] {
        while self.points.len() <= i {
            let v = self.sample();
            let coords = self.frame.coords(&v);
            if let Some(m) = coords.iter().map(modp::from_scalar).collect::<Option<Vec<u64>>>() {
                self.points.push(m);
            }
        }
        &self.points[i]
    }
}

/// A linear combination of monomials, as (exponents, coefficient).
type Combo = Vec<(Vec<u32>, i64)>;

fn eval_combo(c: &Combo, pt: &[u64]) -> u64 {
    let mut acc = 0;
    for (e, coef) in c {
        let mut v = 1;
        for (k, &ek) in e.iter().enumerate() {
            if ek > 0 {
                v = modp::mul(v, modp::pow(pt[k], ek as u64));
            }
        }
        acc = if *coef >= 0 {
            modp::add(acc, modp::mul(v, *coef as u64))
        } else {
            modp::sub(acc, modp::mul(v, (-*coef) as u64))
        };
    }
    acc
}

/// Rank of evaluation of `cols` on the point pool: `3 * cols` points, then two
/// more increments of `cols` points with no change in rank.
fn evaluation_rank(pool: &mut PointPool, cols: &[Combo]) -> Result<usize, KspecError> {
    let n = cols.len();
    if n == 0 {
        return Ok(0);
    }
    let mut ech = Echelon::new(n);
    let mut used = 0;
    let feed = |ech: &mut Echelon, count: usize, used: &mut usize, pool: &mut PointPool| {
        for _ in 0..count {
            if ech.is_full() {
                return;
            }
            let pt = pool.get(*used).to_vec();
            *used += 1;
            ech.insert(cols.iter().map(|c| eval_combo(c, &pt)).collect());
        }
    };
    feed(&mut ech, 3 * n, &mut used, pool);
    let mut stable = 0;
    let mut rounds = 0;
    while stable < 2 && !ech.is_full() {
        let before = ech.rank();
        feed(&mut ech, n, &mut used, pool);
        stable = if ech.rank() == before { stable + 1 } else { 0 };
        rounds += 1;
        if rounds > 20 {
            return Err(KspecError::Sampling(format!("evaluation rank did not stabilize ({n} columns)")));
        }
    }
    Ok(ech.rank())
}

fn monomials(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(k: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k + 1 == cur.len() {
            cur[k] = left as u32;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[k] = e as u32;
            rec(k + 1, left - e, cur, out);
        }
        cur[k] = 0;
    }
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, d, &mut cur, &mut out);
    out
}

fn function_weight(frame: &Frame, e: &[u32]) -> Vec<i32> {
    let mut w = vec![0; frame.group.rank()];
    for (k, &ek) in e.iter().enumerate() {
        for (i, x) in frame.weights[k].iter().enumerate() {
            w[i] -= ek as i32 * x;
        }
    }
    w
}

/// Twined characters of the ring of the subvariety sampled by `pool`, up to `max_deg`.
fn ring_characters(pool: &mut PointPool, max_deg: usize) -> Result<Vec<Character>, KspecError> {
    let frame = pool.frame;
    let n = frame.dim();
    let masks = frame.group.masks();
    let perms: Vec<_> = (0..masks).map(|m| frame.twist_of_mask(m)).collect();
    let mut out = Vec::with_capacity(max_deg + 1);
    for d in 0..=max_deg {
        let mut buckets: BTreeMap<Vec<i32>, Vec<Vec<u32>>> = BTreeMap::new();
        for e in monomials(n, d) {
            buckets.entry(function_weight(frame, &e)).or_default().push(e);
        }
        let mut ch = Character::zero();
        for mask in 0..masks {
            ch.traces.insert(mask, Laurent::new());
        }
        for (w, monos) in &buckets {
            let cols: Vec<Combo> = monos.iter().map(|e| vec![(e.clone(), 1)]).collect();
            let r = evaluation_rank(pool, &cols)? as i64;
            if r != 0 {
                ch.traces.get_mut(&0).expect("mask 0").insert(w.clone(), r);
            }
            for (mask, t) in perms.iter().enumerate().skip(1) {
                let image = |e: &Vec<u32>| -> (Vec<u32>, i64) {
                    let mut f = vec![0u32; n];
                    let mut s = 1i64;
                    for k in 0..n {
                        f[t.perm[k]] = e[k];
                        if t.sign[k] < 0 && e[k] % 2 == 1 {
                            s = -s;
                        }
                    }
                    (f, s)
                };
                if function_weight(frame, &image(&monos[0]).0) != *w {
                    // The twist moves this weight; no contribution to its trace.
                    continue;
                }
                let mut plus: Vec<Combo> = Vec::new();
                let mut minus: Vec<Combo> = Vec::new();
                let mut seen = BTreeSet::new();
                for e in monos {
                    if seen.contains(e) {
                        continue;
                    }
                    let (f, s) = image(e);
                    seen.insert(e.clone());
                    seen.insert(f.clone());
                    if &f == e {
                        if s > 0 {
                            plus.push(vec![(e.clone(), 1)]);
                        } else {
                            minus.push(vec![(e.clone(), 1)]);
                        }
                    } else {
                        plus.push(vec![(e.clone(), 1), (f.clone(), s)]);
                        minus.push(vec![(e.clone(), 1), (f, -s)]);
                    }
                }
                let tr = evaluation_rank(pool, &plus)? as i64 - evaluation_rank(pool, &minus)? as i64;
                if tr != 0 {
                    ch.traces.get_mut(&(mask as u32)).expect("mask").insert(w.clone(), tr);
                }
            }
        }
        out.push(ch);
    }
    Ok(out)
}

/// `C[closure of O]` as a graded `K`-module, from evaluation ranks at seeded
/// random points of the orbit.
pub fn orbit_ring_series(o: &Orbit, max_deg: usize, seed: u64) -> Result<KSeries, KspecError> {
    let member = o.member();
    let frame = p_frame(member)?;
    let rep = representative(o);
    let mut pool = PointPool::new(&frame, member, Some(rep.blocks), seed);
    decompose_all(&frame.group, &ring_characters(&mut pool, max_deg)?)
}

/// Same oracle with points spread over all of `p*`; should reproduce [`sp_series`].
pub fn full_ring_series(member: Member, max_deg: usize, seed: u64) -> Result<KSeries, KspecError> {
    let frame = p_frame(member)?;
    let mut pool = PointPool::new(&frame, member, None, seed);
    decompose_all(&frame.group, &ring_characters(&mut pool, max_deg)?)
}

/// Whether every element of `I(closure of O)` of degree `<= max_deg` vanishes at `x`.
pub fn ideal_vanishes_at(o: &Orbit, x: &[Matrix], max_deg: usize, seed: u64) -> Result<bool, KspecError> {
    let member = o.member();
    let frame = p_frame(member)?;
    let rep = representative(o);
    let mut pool = PointPool::new(&frame, member, Some(rep.blocks), seed);
    let xc = frame.coords(&model::p_coords(member, x));
    let xm: Vec<u64> = xc.iter().map(modp::from_scalar).collect::<Option<_>>().ok_or_else(|| KspecError::Sampling("point has a denominator divisible by p".into()))?;
    for d in 1..=max_deg {
        let mut buckets: BTreeMap<Vec<i32>, Vec<Vec<u32>>> = BTreeMap::new();
        for e in monomials(frame.dim(), d) {
            buckets.entry(function_weight(&frame, &e)).or_default().push(e);
        }
        for monos in buckets.values() {
            let cols: Vec<Combo> = monos.iter().map(|e| vec![(e.clone(), 1)]).collect();
            let r = evaluation_rank(&mut pool, &cols)?;
            let mut ech = Echelon::new(cols.len());
            let mut i = 0;
            while ech.rank() < r {
                let pt = pool.get(i).to_vec();
                ech.insert(cols.iter().map(|c| eval_combo(c, &pt)).collect());
                i += 1;
            }
            // The point is in the zero set iff its evaluation row lies in the span of the samples.
            if ech.insert(cols.iter().map(|c| eval_combo(c, &xm)).collect()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Fiber dimensions of the isotropy modules at `x` (side `G`) and at
/// `x' = phi'(w)` (side `G'`): the character dimension when every computed
/// generator of the orbit-closure ideal vanishes at the point, else 0.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct FiberDims {
    pub at_x: usize,
    pub at_xprime: usize,
}

pub fn isotropy_fiber_dims(d: &OrbitDatum, max_deg: usize, seed: u64) -> Result<FiberDims, KspecError> {
    let sm = construct_w(&d.orbit)?;
    let lifted = lift_datum(d)?;
    let at_x = if ideal_vanishes_at(&d.orbit, &sm.x.blocks, max_deg, seed)? { d.character.dim } else { 0 };
    let at_xprime = if ideal_vanishes_at(&lifted.orbit, &sm.xprime.blocks, max_deg, seed)? { lifted.character.dim } else { 0 };
    Ok(FiberDims { at_x, at_xprime })
}

/// Agreement of two series in degrees `0..=max_deg`.
pub fn series_equal_upto(a: &KSeries, b: &KSeries, max_deg: usize) -> bool {
    a.group == b.group && (0..=max_deg).all(|d| a.degrees.get(d) == b.degrees.get(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::Orbit;
    use crate::pairs::Slot;

    fn binom(n: i64, k: i64) -> i64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn cw_dimensions_are_binomial() {
        for pair in [DualPairSpec::r(1, 2, 2, Slot::First), DualPairSpec::c(1, 1, 2, 2, Slot::First)] {
            let s = cw_series(&pair, 4).unwrap();
            let n = pair.dim_w() as i64;
            for (d, dim) in s.dims().into_iter().enumerate() {
                assert_eq!(dim, binom(n + d as i64 - 1, d as i64), "{pair} degree {d}");
            }
        }
    }

    #[test]
    fn sp_transfer_gives_squares() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let a = sp_series(Member::Sp2nR { n: 1 }, 5).unwrap();
        let b = transfer_series(&pair, &a, 5).unwrap();
        assert_eq!(b.dims(), vec![1, 4, 9, 16, 25, 36]);
    }

    #[test]
    fn oracle_reproduces_polynomial_ring() {
        for m in [Member::Sp2nR { n: 1 }, Member::Opq { p: 2, q: 2 }] {
            let exact = sp_series(m, 3).unwrap();
            let sampled = full_ring_series(m, 3, 7).unwrap();
            assert_eq!(exact, sampled, "{m:?}");
        }
    }

    #[test]
    fn zero_orbit_ring_is_constants() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let o = Orbit::zero(pair, Side::GPrime);
        let s = orbit_ring_series(&o, 3, 1).unwrap();
        assert_eq!(s.dims(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn transfer_of_constants_is_lifted_zero_orbit() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let a = orbit_ring_series(&Orbit::zero(pair, Side::G), 4, 3).unwrap();
        let b = transfer_series(&pair, &a, 4).unwrap();
        let lifted = crate::lift::lift_orbit(&Orbit::zero(pair, Side::G)).unwrap();
        let c = orbit_ring_series(&lifted, 4, 5).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn lifted_rings_match_transfer_for_sp2() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        for o in crate::orbits::enumerate_orbits(&pair, Side::G).unwrap() {
            let a = orbit_ring_series(&o, 4, 21).unwrap();
            let b = transfer_series(&pair, &a, 4).unwrap();
            let c = orbit_ring_series(&crate::lift::lift_orbit(&o).unwrap(), 4, 22).unwrap();
            assert_eq!(b, c, "{}", o.diagram);
        }
    }

    #[test]
    fn p4_routes_agree() {
        let pair = DualPairSpec::c(1, 1, 2, 2, Slot::First);
        let a = orbit_ring_series(&Orbit::parse(pair, Side::G, "+-").unwrap(), 3, 2).unwrap();
        let b = transfer_series(&pair, &a, 3).unwrap();
        for sp in b.degrees.iter().flat_map(|t| t.keys()).take(6) {
            let (l, r) = p4_multiplicity_check(&pair, &a, sp, 3).unwrap();
            assert_eq!(l, r);
            assert!(l > 0);
        }
    }

    #[test]
    fn fibers_at_moment_images() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let o = Orbit::parse(pair, Side::G, "+-").unwrap();
        let f = isotropy_fiber_dims(&OrbitDatum::trivial(o), 3, 4).unwrap();
        assert_eq!(f, FiberDims { at_x: 1, at_xprime: 1 });
    }

    #[test]
    fn json_shape() {
        let s = sp_series(Member::Sp2nR { n: 1 }, 2).unwrap();
        let v = s.to_json();
        assert_eq!(v["group"], "GL(1)");
        assert_eq!(v["degrees"][1]["terms"][0]["weight"], json!([-2]));
    }
}
