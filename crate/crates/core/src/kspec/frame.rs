//! Weight bases of `W` and `p*` in which the twisting elements of the O-factors
//! act by signed permutations.

use std::collections::{BTreeMap, BTreeSet};

use crate::exactlin::{inverse, kernel, Matrix, Scalar};
use crate::model;
use crate::pairs::{DualPairSpec, FactorKind, Member, Side};

use super::character::{KGroup, Twist};
use super::KspecError;

/// A basis of a `K_C`-module `U` adapted to the torus and the twists.
#[derive(Clone, Debug)]
pub struct Frame {
    pub group: KGroup,
    /// Columns are the basis vectors.
    pub basis: Matrix,
    /// Coordinates of a vector in the basis: `inverse * v`.
    pub inverse: Matrix,
    /// Torus weight of each basis vector.
    pub weights: Vec<Vec<i32>>,
    /// Per twistable factor: `r_f b_k = sign[k] * b_{perm[k]}`.
    pub twists: Vec<SignedPerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub sign: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm { perm: (0..n).collect(), sign: vec![1; n] }
    }

    /// `self` after `other`.
    pub fn after(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut sign = vec![1; n];
        for k in 0..n {
            let j = other.perm[k];
            perm[k] = self.perm[j];
            sign[k] = other.sign[k] * self.sign[j];
        }
        SignedPerm { perm, sign }
    }
}

impl Frame {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// The combined signed permutation of `r_S`.
    pub fn twist_of_mask(&self, mask: u32) -> SignedPerm {
        let mut out = SignedPerm::identity(self.dim());
        for (b, t) in self.twists.iter().enumerate() {
            if mask >> b & 1 == 1 {
                out = t.after(&out);
            }
        }
        out
    }

    /// Coordinates of `v` in the frame.
    pub fn coords(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.inverse.apply(v)
    }
}

/// Splits `span(basis)` into eigenspaces of `op` for integer eigenvalues in `-bound..=bound`.
fn eigensplit(op: &Matrix, basis: &[Vec<Scalar>], candidates: &[i32]) -> Result<Vec<(i32, Vec<Vec<Scalar>>)>, KspecError> {
    let n = op.rows();
    let m = basis.len();
    let b = Matrix::from_fn(n, m, |r, c| basis[c][r].clone());
    let hb = op.mul(&b);
    let mut out = Vec::new();
    let mut total = 0;
    for &c in candidates {
        let shifted = hb.sub(&b.scale(&Scalar::int(c as i64)));
        let ker = kernel(&shifted);
        if ker.is_empty() {
            continue;
        }
        total += ker.len();
        let vecs = ker.iter().map(|a| b.apply(a)).collect();
        out.push((c, vecs));
    }
    if total != m {
        return Err(KspecError::Decomposition("operator is not diagonalizable with small integer eigenvalues".into()));
    }
    Ok(out)
}

/// Builds a frame from commuting Cartan operators (one per torus coordinate of
/// `group`) and the twisting involutions (one per twistable factor).
pub fn build_frame(group: KGroup, cartan: &[Matrix], twist_ops: &[Matrix]) -> Result<Frame, KspecError> {
    let n = cartan.first().map_or_else(|| twist_ops.first().map_or(0, |m| m.rows()), |m| m.rows());
    let tw = group.twistables();
    assert_eq!(cartan.len(), group.rank());
    assert_eq!(twist_ops.len(), tw.len());
    let cands: Vec<i32> = (-8..=8).collect();
    let std: Vec<Vec<Scalar>> = (0..n)
        .map(|k| (0..n).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    let mut spaces: Vec<(Vec<i32>, Vec<Vec<Scalar>>)> = vec![(Vec::new(), std)];
    for h in cartan {
        let mut next = Vec::new();
        for (w, b) in spaces {
            for (c, sub) in eigensplit(h, &b, &cands)? {
                let mut w2 = w.clone();
                w2.push(c);
                next.push((w2, sub));
            }
        }
        spaces = next;
    }
    let spaces: BTreeMap<Vec<i32>, Vec<Vec<Scalar>>> = spaces.into_iter().collect();

    let reflect = |mask: u32, w: &[i32]| -> Vec<i32> {
        let mut out = w.to_vec();
        for (b, (f, t)) in tw.iter().enumerate() {
            if mask >> b & 1 == 1 && *t == Twist::Reflection {
                let last = group.coords(*f).end - 1;
                out[last] = -out[last];
            }
        }
        out
    };
    let apply_mask = |mask: u32, v: &[Scalar]| -> Vec<Scalar> {
        let mut v = v.to_vec();
        for (b, op) in twist_ops.iter().enumerate() {
            if mask >> b & 1 == 1 {
                v = op.apply(&v);
            }
        }
        v
    };

    let ntw = tw.len();
    let mut vectors: Vec<Vec<Scalar>> = Vec::new();
    let mut weights: Vec<Vec<i32>> = Vec::new();
    // (orbit id, representative mask, index in the fixed eigenbasis) per basis vector.
    let mut labels: Vec<(usize, u32, usize)> = Vec::new();
    let mut orbit_data: Vec<(Vec<i32>, Vec<Vec<i8>>, BTreeMap<Vec<i32>, u32>)> = Vec::new();
    let mut index: BTreeMap<(usize, u32, usize), usize> = BTreeMap::new();
    let mut done: BTreeSet<Vec<i32>> = BTreeSet::new();
    for (mu, space) in &spaces {
        if done.contains(mu) {
            continue;
        }
        let mut reps: BTreeMap<Vec<i32>, u32> = BTreeMap::new();
        for mask in 0..(1u32 << ntw) {
            reps.entry(reflect(mask, mu)).or_insert(mask);
        }
        let stab: Vec<usize> = (0..ntw).filter(|&b| reflect(1 << b, mu) == *mu).collect();
        // Joint eigenbasis of the stabilizing twists on the weight space.
        let mut parts: Vec<(Vec<i8>, Vec<Vec<Scalar>>)> = vec![(Vec::new(), space.clone())];
        for &b in &stab {
            let mut next = Vec::new();
            for (signs, basis) in parts {
                for (c, sub) in eigensplit(&twist_ops[b], &basis, &[-1, 1])? {
                    let mut s = signs.clone();
                    s.push(c as i8);
                    next.push((s, sub));
                }
            }
            parts = next;
        }
        let mut fixed: Vec<(Vec<i8>, Vec<Scalar>)> = Vec::new();
        for (signs, basis) in parts {
            for v in basis {
                // Full sign vector, indexed by twist bit.
                let mut full = vec![0i8; ntw];
                for (j, &b) in stab.iter().enumerate() {
                    full[b] = signs[j];
                }
                fixed.push((full, v));
            }
        }
        let oid = orbit_data.len();
        for (nu, &mask) in &reps {
            if spaces.get(nu).map(|s| s.len()) != Some(space.len()) {
                return Err(KspecError::Decomposition(format!("twist does not preserve weight multiplicities at {nu:?}")));
            }
            done.insert(nu.clone());
            for (i, (_, v)) in fixed.iter().enumerate() {
                index.insert((oid, mask, i), vectors.len());
                vectors.push(apply_mask(mask, v));
                weights.push(nu.clone());
                labels.push((oid, mask, i));
            }
        }
        orbit_data.push((mu.clone(), fixed.into_iter().map(|(s, _)| s).collect(), reps));
    }

    let mut twists = Vec::with_capacity(ntw);
    for b in 0..ntw {
        let mut perm = vec![0; n];
        let mut sign = vec![1i8; n];
        for (k, &(oid, mask, i)) in labels.iter().enumerate() {
            let (mu, signs, reps) = &orbit_data[oid];
            let moved = mask ^ (1 << b);
            let target = reps[&reflect(moved, mu)];
            // r_b r_mask = r_target r_u with r_u fixing the representative weight.
            let u = moved ^ target;
            let mut s = 1i8;
            for j in 0..ntw {
                if u >> j & 1 == 1 {
                    s *= signs[i][j];
                }
            }
            perm[k] = index[&(oid, target, i)];
            sign[k] = s;
        }
        twists.push(SignedPerm { perm, sign });
    }

    let basis = Matrix::from_fn(n, n, |r, c| vectors[c][r].clone());
    let inverse = inverse(&basis).ok_or_else(|| KspecError::Decomposition("frame is not a basis".into()))?;
    Ok(Frame { group, basis, inverse, weights, twists })
}

/// The twisting involution of an O-factor, in its defining representation.
fn twist_element(kind: FactorKind) -> Matrix {
    let a = kind.size();
    if a % 2 == 1 {
        return Matrix::identity(a).neg();
    }
    let mut g = Matrix::identity(a);
    g[(a - 1, a - 1)] = Scalar::int(-1);
    g
}

pub fn k_group(member: Member) -> Result<KGroup, KspecError> {
    KGroup::new(member.factors().iter().map(|f| f.kind).collect())
}

pub(crate) fn twisting_elements(member: Member) -> Vec<Matrix> {
    member
        .factors()
        .iter()
        .filter(|f| matches!(f.kind, FactorKind::O(a) if a > 0))
        .map(|f| model::embed_group(member, f, &twist_element(f.kind)))
        .collect()
}

fn p_operator(member: Member, f: impl Fn(&[Matrix]) -> Vec<Matrix>) -> Matrix {
    let d = member.dim_p();
    let cols: Vec<Vec<Scalar>> = (0..d)
        .map(|k| {
            let mut e = vec![Scalar::zero(); d];
            e[k] = Scalar::one();
            model::p_coords(member, &f(&model::p_from_coords(member, &e)))
        })
        .collect();
    Matrix::from_fn(d, d, |r, c| cols[c][r].clone())
}

/// Frame of `p*` for one member, in `p*` coordinates.
pub fn p_frame(member: Member) -> Result<Frame, KspecError> {
    let group = k_group(member)?;
    let cartan: Vec<Matrix> = model::k_cartan(member)
        .iter()
        .map(|h| p_operator(member, |b| model::coadjoint(member, h, b)))
        .collect();
    let twists: Vec<Matrix> = twisting_elements(member)
        .iter()
        .map(|g| p_operator(member, |b| model::group_on_p(member, g, b)))
        .collect();
    if member.dim_p() == 0 {
        return Ok(Frame { group, basis: Matrix::zeros(0, 0), inverse: Matrix::zeros(0, 0), weights: vec![], twists: vec![SignedPerm::identity(0); twists.len()] });
    }
    build_frame(group, &cartan, &twists)
}

/// Frame of `W` for `K x K'` (factors of side `G` first), in `W` coordinates.
pub fn w_frame(pair: &DualPairSpec) -> Result<Frame, KspecError> {
    let sg = pair.slot_of(Side::G);
    let sgp = pair.slot_of(Side::GPrime);
    let (mg, mgp) = (pair.member(sg), pair.member(sgp));
    let group = k_group(mg)?.product(&k_group(mgp)?);
    let mut cartan = Vec::new();
    let mut twists = Vec::new();
    for (slot, member) in [(sg, mg), (sgp, mgp)] {
        for h in model::k_cartan(member) {
            cartan.push(model::w_operator(pair, |w| model::lie_on_w(pair, slot, &h, w)));
        }
        for g in twisting_elements(member) {
            twists.push(model::w_operator(pair, |w| model::group_on_w(pair, slot, &g, w)));
        }
    }
    build_frame(group, &cartan, &twists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::Slot;

    fn check(frame: &Frame, cartan_count: usize) {
        let n = frame.dim();
        for t in &frame.twists {
            // Involution and weight-compatible.
            let sq = t.after(t);
            assert_eq!(sq, SignedPerm::identity(n));
        }
        assert_eq!(frame.weights.iter().map(|w| w.len()).max().unwrap_or(cartan_count), cartan_count);
    }

    #[test]
    fn w_frame_weights() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let f = w_frame(&pair).unwrap();
        check(&f, 3);
        // W = C^1 (x) C^4 as GL(1) x O(2) x O(2): weights (+-1, +-1, 0) and (+-1, 0, +-1).
        let mut got: Vec<Vec<i32>> = f.weights.clone();
        got.sort();
        assert_eq!(got.len(), 4);
        assert!(got.iter().all(|w| w[0].abs() == 1 && w[1].abs() + w[2].abs() == 1));
        assert_eq!(f.twists.len(), 2);
    }

    #[test]
    fn twists_act_as_claimed() {
        for pair in [DualPairSpec::r(1, 3, 3, Slot::First), DualPairSpec::r(1, 2, 2, Slot::First)] {
            let f = w_frame(&pair).unwrap();
            let member = pair.member(pair.slot_of(Side::GPrime));
            let slot = pair.slot_of(Side::GPrime);
            for (b, g) in twisting_elements(member).iter().enumerate() {
                let op = model::w_operator(&pair, |w| model::group_on_w(&pair, slot, g, w));
                let t = &f.twists[b];
                for k in 0..f.dim() {
                    let image = op.apply(&f.basis.col(k));
                    let expect: Vec<Scalar> =
                        f.basis.col(t.perm[k]).iter().map(|x| x * &Scalar::int(t.sign[k] as i64)).collect();
                    assert_eq!(image, expect);
                }
            }
        }
    }

    #[test]
    fn p_frame_sizes() {
        for m in [Member::Sp2nR { n: 1 }, Member::Opq { p: 2, q: 2 }, Member::U { a: 2, b: 2 }, Member::Opq { p: 3, q: 3 }, Member::OC { p: 4 }] {
            let f = p_frame(m).unwrap();
            assert_eq!(f.dim(), m.dim_p());
        }
        // p* of Sp(2,R): weights 2, -2 for GL(1).
        let f = p_frame(Member::Sp2nR { n: 1 }).unwrap();
        let mut w: Vec<i32> = f.weights.iter().map(|w| w[0]).collect();
        w.sort();
        assert_eq!(w, vec![-2, 2]);
    }
}
