//! The concrete matrix model of each member: operators on the defining module
//! `V = V+ (+) V-`, the Lie algebra `k` as block-diagonal operators, and the
//! actions of `K_C` and `k` on `W` and on `p*`.
//!
//! Conventions (fixed once, tested for equivariance):
//! - a point `x` of `p*` is turned into an odd operator `X` on `V`, and `k`
//!   acts on `p*` by the commutator `[Z, X]`;
//! - a group element acts on `p*` by `X -> g X g^-1`.

use rand::Rng;

use crate::exactlin::{inverse, kernel, Matrix, Scalar};
use crate::pairs::{BlockKind, Case, DualPairSpec, Factor, FactorKind, Member, Placement, Slot};

/// `J_{2a} = [[0, I], [-I, 0]]`.
pub fn j_matrix(a: usize) -> Matrix {
    let mut m = Matrix::zeros(2 * a, 2 * a);
    for k in 0..a {
        m[(k, a + k)] = Scalar::one();
        m[(a + k, k)] = Scalar::int(-1);
    }
    m
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = Scalar::one();
    m
}

/// Basis of the Lie algebra of a factor, in its defining representation.
pub fn factor_lie_basis(kind: FactorKind) -> Vec<Matrix> {
    match kind {
        FactorKind::GL(a) => {
            let mut out = Vec::with_capacity(a * a);
            for i in 0..a {
                for j in 0..a {
                    out.push(unit(a, i, j));
                }
            }
            out
        }
        FactorKind::O(a) => {
            let mut out = Vec::new();
            for i in 0..a {
                for j in i + 1..a {
                    out.push(unit(a, i, j).sub(&unit(a, j, i)));
                }
            }
            out
        }
        FactorKind::Sp(a) => {
            let n = 2 * a;
            let mut out = Vec::new();
            for i in 0..a {
                for j in 0..a {
                    out.push(unit(n, i, j).sub(&unit(n, a + j, a + i)));
                }
            }
            for i in 0..a {
                for j in i..a {
                    let mut b = unit(n, i, a + j);
                    let mut c = unit(n, a + i, j);
                    if i != j {
                        b = b.add(&unit(n, j, a + i));
                        c = c.add(&unit(n, a + j, i));
                    }
                    out.push(b);
                    out.push(c);
                }
            }
            out
        }
    }
}

/// Cartan elements of a factor with integer eigenvalues on the defining module.
pub fn factor_cartan(kind: FactorKind) -> Vec<Matrix> {
    match kind {
        FactorKind::GL(a) => (0..a).map(|i| unit(a, i, i)).collect(),
        FactorKind::Sp(a) => (0..a).map(|i| unit(2 * a, i, i).sub(&unit(2 * a, a + i, a + i))).collect(),
        FactorKind::O(a) => (0..a / 2)
            .map(|j| unit(a, 2 * j, 2 * j + 1).sub(&unit(a, 2 * j + 1, 2 * j)).scale(&Scalar::i()))
            .collect(),
    }
}

/// Weight basis of the defining module (columns), ordered so that the chosen
/// positive root vectors are upper triangular.
pub fn factor_weight_basis(kind: FactorKind) -> Matrix {
    match kind {
        FactorKind::GL(a) => Matrix::identity(a),
        FactorKind::Sp(a) => {
            let mut p = Matrix::zeros(2 * a, 2 * a);
            for k in 0..a {
                p[(k, k)] = Scalar::one();
                p[(a + k, 2 * a - 1 - k)] = Scalar::one();
            }
            p
        }
        FactorKind::O(a) => {
            let m = a / 2;
            let mut p = Matrix::zeros(a, a);
            for j in 0..m {
                // z_j = e_{2j} - i e_{2j+1} has weight +1 for the j-th Cartan element.
                p[(2 * j, j)] = Scalar::one();
                p[(2 * j + 1, j)] = Scalar::gauss(0, -1);
                p[(2 * j, a - 1 - j)] = Scalar::one();
                p[(2 * j + 1, a - 1 - j)] = Scalar::i();
            }
            if a % 2 == 1 {
                p[(a - 1, m)] = Scalar::one();
            }
            p
        }
    }
}

/// The invariant form of a factor (identity for `GL`, where none is used).
pub fn factor_form(kind: FactorKind) -> Matrix {
    match kind {
        FactorKind::GL(a) | FactorKind::O(a) => Matrix::identity(a),
        FactorKind::Sp(a) => j_matrix(a),
    }
}

pub fn is_factor_group_element(kind: FactorKind, g: &Matrix) -> bool {
    match kind {
        FactorKind::GL(_) => inverse(g).is_some(),
        FactorKind::O(a) => g.transpose().mul(g) == Matrix::identity(a),
        FactorKind::Sp(a) => {
            let j = j_matrix(a);
            g.transpose().mul(&j).mul(g) == j
        }
    }
}

fn small_int<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::int(rng.gen_range(-2..=2))
}

/// A seeded random element of a factor, exact.
pub fn random_factor_element<R: Rng>(kind: FactorKind, rng: &mut R) -> Matrix {
    let n = kind.size();
    loop {
        let g = match kind {
            FactorKind::GL(_) => Matrix::from_fn(n, n, |_, _| small_int(rng)),
            FactorKind::O(_) | FactorKind::Sp(_) => {
                let basis = factor_lie_basis(kind);
                let mut y = Matrix::zeros(n, n);
                for b in &basis {
                    y = y.add(&b.scale(&small_int(rng)));
                }
                let id = Matrix::identity(n);
                let Some(inv) = inverse(&id.add(&y)) else { continue };
                // Cayley transform lands in the identity component.
                let mut g = id.sub(&y).mul(&inv);
                if let FactorKind::O(_) = kind {
                    if n > 0 && rng.gen_bool(0.5) {
                        for r in 0..n {
                            g[(r, 0)] = -&g[(r, 0)];
                        }
                    }
                }
                g
            }
        };
        if inverse(&g).is_some() {
            return g;
        }
    }
}

/// Embeds a Lie algebra element of factor `f` into operators on `V`.
pub fn embed_lie(member: Member, f: &Factor, m: &Matrix) -> Matrix {
    let size = member.size();
    let mut out = Matrix::zeros(size, size);
    match f.placement {
        Placement::Block { offset } => out.set_block(offset, offset, m),
        Placement::Contragredient => {
            let n = m.rows();
            out.set_block(0, 0, m);
            out.set_block(n, n, &m.transpose().neg());
        }
    }
    out
}

/// Embeds a group element of factor `f` into operators on `V`.
pub fn embed_group(member: Member, f: &Factor, g: &Matrix) -> Matrix {
    let size = member.size();
    let mut out = Matrix::identity(size);
    match f.placement {
        Placement::Block { offset } => out.set_block(offset, offset, g),
        Placement::Contragredient => {
            let n = g.rows();
            out.set_block(0, 0, g);
            out.set_block(n, n, &inverse(g).expect("invertible").transpose());
        }
    }
    out
}

/// The block of a `V`-operator belonging to factor `f`.
pub fn factor_part(f: &Factor, z: &Matrix) -> Matrix {
    let n = f.kind.size();
    match f.placement {
        Placement::Block { offset } => z.submatrix(offset, offset, n, n),
        Placement::Contragredient => z.submatrix(0, 0, n, n),
    }
}

/// Basis of `k` as operators on `V`, factor by factor.
pub fn k_basis(member: Member) -> Vec<Matrix> {
    let mut out = Vec::new();
    for f in member.factors() {
        for b in factor_lie_basis(f.kind) {
            out.push(embed_lie(member, &f, &b));
        }
    }
    out
}

/// Cartan elements of `k` as operators on `V`.
pub fn k_cartan(member: Member) -> Vec<Matrix> {
    let mut out = Vec::new();
    for f in member.factors() {
        for h in factor_cartan(f.kind) {
            out.push(embed_lie(member, &f, &h));
        }
    }
    out
}

/// Seeded random element of `K_C` as an operator on `V`.
pub fn random_k_element<R: Rng>(member: Member, rng: &mut R) -> Matrix {
    let mut g = Matrix::identity(member.size());
    for f in member.factors() {
        let e = random_factor_element(f.kind, rng);
        g = g.mul(&embed_group(member, &f, &e));
    }
    g
}

/// Gram matrix of the invariant form on `V` (`None` for the Hermitian case).
pub fn gram(member: Member) -> Option<Matrix> {
    Some(match member {
        Member::Sp2nR { n } => j_matrix(n),
        Member::Opq { p, q } => Matrix::block_diag(&[&Matrix::identity(p), &Matrix::identity(q).neg()]),
        Member::U { .. } => return None,
        Member::OStar { n } => {
            let mut m = Matrix::zeros(2 * n, 2 * n);
            m.set_block(0, n, &Matrix::identity(n));
            m.set_block(n, 0, &Matrix::identity(n));
            m
        }
        Member::Sppq { p, q } => Matrix::block_diag(&[&j_matrix(p), &j_matrix(q)]),
        Member::Sp2nC { n } => j_matrix(n),
        Member::OC { p } => Matrix::identity(p),
    })
}

/// Converts the blocks of a point of `p*` to the odd operator on `V`.
pub fn to_operator(member: Member, blocks: &[Matrix]) -> Matrix {
    let (a, b) = member.signature();
    let odd = |upper: &Matrix, lower: &Matrix| {
        let mut x = Matrix::zeros(a + b, a + b);
        x.set_block(0, a, upper);
        x.set_block(a, 0, lower);
        x
    };
    match member {
        Member::Sp2nR { .. } | Member::OStar { .. } | Member::U { .. } => odd(&blocks[0], &blocks[1]),
        Member::Opq { .. } => odd(&blocks[0], &blocks[0].transpose()),
        Member::Sppq { p, q } => odd(
            &blocks[0].mul(&j_matrix(q)),
            &blocks[0].transpose().mul(&j_matrix(p)),
        ),
        Member::Sp2nC { n } => j_matrix(n).mul(&blocks[0]).neg(),
        Member::OC { .. } => blocks[0].clone(),
    }
}

/// Inverse of [`to_operator`] on the image.
pub fn from_operator(member: Member, x: &Matrix) -> Vec<Matrix> {
    let (a, b) = member.signature();
    match member {
        Member::Sp2nR { .. } | Member::OStar { .. } | Member::U { .. } => {
            vec![x.submatrix(0, a, a, b), x.submatrix(a, 0, b, a)]
        }
        Member::Opq { .. } => vec![x.submatrix(0, a, a, b)],
        Member::Sppq { q, .. } => vec![x.submatrix(0, a, a, b).mul(&j_matrix(q)).neg()],
        Member::Sp2nC { n } => vec![j_matrix(n).mul(x)],
        Member::OC { .. } => vec![x.clone()],
    }
}

/// Independent coordinates of a block.
pub fn block_coords(kind: BlockKind, m: &Matrix) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(kind.dim());
    match kind {
        BlockKind::Sym(n) => {
            for i in 0..n {
                for j in i..n {
                    out.push(m[(i, j)].clone());
                }
            }
        }
        BlockKind::Alt(n) => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(m[(i, j)].clone());
                }
            }
        }
        BlockKind::Full(..) => out.extend(m.data().iter().cloned()),
    }
    out
}

pub fn block_from_coords(kind: BlockKind, v: &[Scalar]) -> Matrix {
    let mut it = v.iter();
    match kind {
        BlockKind::Sym(n) => {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let s = it.next().expect("coords").clone();
                    m[(j, i)] = s.clone();
                    m[(i, j)] = s;
                }
            }
            m
        }
        BlockKind::Alt(n) => {
            let mut m = Matrix::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let s = it.next().expect("coords").clone();
                    m[(j, i)] = -&s;
                    m[(i, j)] = s;
                }
            }
            m
        }
        BlockKind::Full(r, c) => Matrix::from_flat(r, c, v.to_vec()),
    }
}

pub fn blocks_satisfy_shape(kind: BlockKind, m: &Matrix) -> bool {
    if m.shape() != kind.matrix_shape() {
        return false;
    }
    match kind {
        BlockKind::Sym(_) => m.transpose() == *m,
        BlockKind::Alt(_) => m.transpose() == m.neg(),
        BlockKind::Full(..) => true,
    }
}

/// Flat coordinates of a point of `p*` of `member`.
pub fn p_coords(member: Member, blocks: &[Matrix]) -> Vec<Scalar> {
    member
        .p_blocks()
        .iter()
        .zip(blocks)
        .flat_map(|(k, m)| block_coords(*k, m))
        .collect()
}

pub fn p_from_coords(member: Member, v: &[Scalar]) -> Vec<Matrix> {
    let mut out = Vec::new();
    let mut off = 0;
    for k in member.p_blocks() {
        out.push(block_from_coords(k, &v[off..off + k.dim()]));
        off += k.dim();
    }
    out
}

/// Infinitesimal coadjoint action, as a point of `p*`.
pub fn coadjoint(member: Member, z: &Matrix, blocks: &[Matrix]) -> Vec<Matrix> {
    let x = to_operator(member, blocks);
    from_operator(member, &z.commutator(&x))
}

/// Group action on `p*`.
pub fn group_on_p(member: Member, g: &Matrix, blocks: &[Matrix]) -> Vec<Matrix> {
    let x = to_operator(member, blocks);
    let gi = inverse(g).expect("group element is invertible");
    from_operator(member, &g.mul(&x).mul(&gi))
}

/// Matrix (columns = basis of `k`) of `Z -> [Z, x]` in `p*` coordinates.
pub fn coadjoint_matrix(member: Member, basis: &[Matrix], blocks: &[Matrix]) -> Matrix {
    let cols: Vec<Vec<Scalar>> = basis.iter().map(|z| p_coords(member, &coadjoint(member, z, blocks))).collect();
    Matrix::from_fn(member.dim_p(), basis.len(), |r, c| cols[c][r].clone())
}

/// Basis of `k_x` (as `V`-operators) for a point `x`.
pub fn stabilizer_basis(member: Member, blocks: &[Matrix]) -> Vec<Matrix> {
    let basis = k_basis(member);
    let m = coadjoint_matrix(member, &basis, blocks);
    kernel(&m)
        .into_iter()
        .map(|v| combine(&basis, &v))
        .collect()
}

pub fn combine(basis: &[Matrix], coeffs: &[Scalar]) -> Matrix {
    let (r, c) = basis.first().map_or((0, 0), |b| b.shape());
    let mut out = Matrix::zeros(r, c);
    for (b, s) in basis.iter().zip(coeffs) {
        if !s.is_zero() {
            out = out.add(&b.scale(s));
        }
    }
    out
}

/// Infinitesimal action of `Z` (a `V`-operator of the member in `slot`) on `W`.
pub fn lie_on_w(pair: &DualPairSpec, slot: Slot, z: &Matrix, w: &[Matrix]) -> Vec<Matrix> {
    let member = pair.member(slot);
    let fs = member.factors();
    let part = |k: usize| factor_part(&fs[k], z);
    match (pair.case, slot) {
        (Case::R, Slot::First) | (Case::H, Slot::First) => {
            let zg = part(0);
            vec![w[0].mul(&zg.transpose()), w[1].mul(&zg).neg()]
        }
        (Case::R, Slot::Second) | (Case::H, Slot::Second) => vec![part(0).mul(&w[0]), part(1).mul(&w[1])],
        (Case::C, Slot::First) => {
            let (z1, z2) = (part(0), part(1));
            vec![
                w[0].mul(&z1.transpose()),
                w[1].mul(&z2).neg(),
                w[2].mul(&z1).neg(),
                w[3].mul(&z2.transpose()),
            ]
        }
        (Case::C, Slot::Second) => {
            let (y1, y2) = (part(0), part(1));
            vec![
                y1.mul(&w[0]),
                y1.transpose().mul(&w[1]).neg(),
                y2.transpose().mul(&w[2]).neg(),
                y2.mul(&w[3]),
            ]
        }
        (Case::CxSpO, Slot::First) => vec![w[0].mul(&part(0)).neg()],
        (Case::CxSpO, Slot::Second) => vec![part(0).mul(&w[0])],
    }
}

/// Action of a group element `g` (a `V`-operator of the member in `slot`) on `W`.
pub fn group_on_w(pair: &DualPairSpec, slot: Slot, g: &Matrix, w: &[Matrix]) -> Vec<Matrix> {
    let member = pair.member(slot);
    let fs = member.factors();
    let part = |k: usize| factor_part(&fs[k], g);
    let inv = |m: &Matrix| inverse(m).expect("group element is invertible");
    match (pair.case, slot) {
        (Case::R, Slot::First) | (Case::H, Slot::First) => {
            let gg = part(0);
            vec![w[0].mul(&gg.transpose()), w[1].mul(&inv(&gg))]
        }
        (Case::R, Slot::Second) | (Case::H, Slot::Second) => vec![part(0).mul(&w[0]), part(1).mul(&w[1])],
        (Case::C, Slot::First) => {
            let (g1, g2) = (part(0), part(1));
            vec![w[0].mul(&g1.transpose()), w[1].mul(&inv(&g2)), w[2].mul(&inv(&g1)), w[3].mul(&g2.transpose())]
        }
        (Case::C, Slot::Second) => {
            let (h1, h2) = (part(0), part(1));
            vec![
                h1.mul(&w[0]),
                inv(&h1).transpose().mul(&w[1]),
                inv(&h2).transpose().mul(&w[2]),
                h2.mul(&w[3]),
            ]
        }
        (Case::CxSpO, Slot::First) => vec![w[0].mul(&inv(&part(0)))],
        (Case::CxSpO, Slot::Second) => vec![part(0).mul(&w[0])],
    }
}

/// The moment map of the member in `slot`.
pub fn moment(pair: &DualPairSpec, slot: Slot, w: &[Matrix]) -> Vec<Matrix> {
    let v = pair.params();
    match (pair.case, slot) {
        (Case::R, Slot::First) => vec![w[0].transpose().mul(&w[0]), w[1].transpose().mul(&w[1])],
        (Case::R, Slot::Second) | (Case::H, Slot::Second) => vec![w[0].mul(&w[1].transpose())],
        (Case::C, Slot::First) => vec![w[0].transpose().mul(&w[1]), w[3].transpose().mul(&w[2])],
        (Case::C, Slot::Second) => vec![w[0].mul(&w[2].transpose()), w[3].mul(&w[1].transpose())],
        (Case::H, Slot::First) => vec![
            w[0].transpose().mul(&j_matrix(v[1])).mul(&w[0]),
            w[1].transpose().mul(&j_matrix(v[2])).mul(&w[1]),
        ],
        (Case::CxSpO, Slot::First) => vec![w[0].transpose().mul(&w[0])],
        (Case::CxSpO, Slot::Second) => vec![w[0].mul(&j_matrix(v[0])).mul(&w[0].transpose())],
    }
}

/// Flattened coordinates of a point of `W`.
pub fn w_coords(w: &[Matrix]) -> Vec<Scalar> {
    w.iter().flat_map(|m| m.data().iter().cloned()).collect()
}

pub fn w_from_coords(pair: &DualPairSpec, v: &[Scalar]) -> Vec<Matrix> {
    let mut out = Vec::new();
    let mut off = 0;
    for b in pair.w_blocks() {
        let len = b.rows * b.cols;
        out.push(Matrix::from_flat(b.rows, b.cols, v[off..off + len].to_vec()));
        off += len;
    }
    out
}

/// Matrix of a linear endomorphism of `W` given as a function on blocks.
pub fn w_operator(pair: &DualPairSpec, f: impl Fn(&[Matrix]) -> Vec<Matrix>) -> Matrix {
    let d = pair.dim_w();
    let cols: Vec<Vec<Scalar>> = (0..d)
        .map(|k| {
            let mut e = vec![Scalar::zero(); d];
            e[k] = Scalar::one();
            w_coords(&f(&w_from_coords(pair, &e)))
        })
        .collect();
    Matrix::from_fn(d, d, |r, c| cols[c][r].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::registered_small_pairs;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_w(pair: &DualPairSpec, rng: &mut ChaCha8Rng) -> Vec<Matrix> {
        let v: Vec<Scalar> = (0..pair.dim_w()).map(|_| Scalar::gauss(rng.gen_range(-2..=2), rng.gen_range(-1..=1))).collect();
        w_from_coords(pair, &v)
    }

    #[test]
    fn lie_bases_have_expected_dimensions() {
        for kind in [FactorKind::GL(3), FactorKind::O(4), FactorKind::O(5), FactorKind::Sp(2)] {
            let b = factor_lie_basis(kind);
            assert_eq!(b.len(), kind.dim());
            let flat: Vec<Vec<Scalar>> = b.iter().map(|m| m.flatten()).collect();
            assert_eq!(Matrix::from_rows(flat).rank(), kind.dim());
            let form = factor_form(kind);
            if !matches!(kind, FactorKind::GL(_)) {
                for y in &b {
                    assert!(y.transpose().mul(&form).add(&form.mul(y)).is_zero());
                }
            }
        }
    }

    #[test]
    fn weight_basis_diagonalizes_cartan() {
        for kind in [FactorKind::GL(2), FactorKind::O(2), FactorKind::O(3), FactorKind::O(4), FactorKind::Sp(2)] {
            let p = factor_weight_basis(kind);
            let pi = inverse(&p).unwrap();
            for h in factor_cartan(kind) {
                let d = pi.mul(&h).mul(&p);
                for r in 0..d.rows() {
                    for c in 0..d.cols() {
                        assert!(r == c || d[(r, c)].is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn random_elements_are_group_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in [FactorKind::GL(2), FactorKind::O(3), FactorKind::Sp(1), FactorKind::Sp(2)] {
            for _ in 0..5 {
                let g = random_factor_element(kind, &mut rng);
                assert!(is_factor_group_element(kind, &g));
            }
        }
    }

    #[test]
    fn operators_are_skew_for_the_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for pair in registered_small_pairs() {
            for slot in [Slot::First, Slot::Second] {
                let member = pair.member(slot);
                let w = random_w(&pair, &mut rng);
                let x = moment(&pair, slot, &w);
                for (k, m) in member.p_blocks().iter().zip(&x) {
                    assert!(blocks_satisfy_shape(*k, m), "{pair} {slot:?}");
                }
                let op = to_operator(member, &x);
                assert_eq!(from_operator(member, &op), x);
                if let Some(b) = gram(member) {
                    assert!(op.transpose().mul(&b).add(&b.mul(&op)).is_zero(), "{pair} {slot:?}");
                }
                for z in k_basis(member) {
                    if let Some(b) = gram(member) {
                        assert!(z.transpose().mul(&b).add(&b.mul(&z)).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn moment_maps_are_equivariant_and_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for pair in registered_small_pairs() {
            for slot in [Slot::First, Slot::Second] {
                let member = pair.member(slot);
                let w = random_w(&pair, &mut rng);
                let x = moment(&pair, slot, &w);
                let y = moment(&pair, slot.other(), &w);
                // Infinitesimal: d(phi)(Z.w) = [Z, phi(w)].
                for z in k_basis(member) {
                    let zw = lie_on_w(&pair, slot, &z, &w);
                    let lhs: Vec<Matrix> = moment(&pair, slot, &w.iter().zip(&zw).map(|(a, b)| a.add(b)).collect::<Vec<_>>())
                        .iter()
                        .zip(&x)
                        .zip(&moment(&pair, slot, &zw))
                        .map(|((s, x0), q)| s.sub(x0).sub(q))
                        .collect();
                    assert_eq!(lhs, coadjoint(member, &z, &x), "{pair} {slot:?}");
                    let other: Vec<Matrix> = moment(&pair, slot.other(), &w.iter().zip(&zw).map(|(a, b)| a.add(b)).collect::<Vec<_>>())
                        .iter()
                        .zip(&y)
                        .zip(&moment(&pair, slot.other(), &zw))
                        .map(|((s, y0), q)| s.sub(y0).sub(q))
                        .collect();
                    assert!(other.iter().all(Matrix::is_zero), "{pair} {slot:?} invariance");
                }
                // Group level.
                let g = random_k_element(member, &mut rng);
                let gw = group_on_w(&pair, slot, &g, &w);
                assert_eq!(moment(&pair, slot, &gw), group_on_p(member, &g, &x));
                assert_eq!(moment(&pair, slot.other(), &gw), y);
            }
        }
    }

    #[test]
    fn group_and_lie_actions_commute_across_slots() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for pair in registered_small_pairs() {
            let w = random_w(&pair, &mut rng);
            let g = random_k_element(pair.member(Slot::First), &mut rng);
            let h = random_k_element(pair.member(Slot::Second), &mut rng);
            let a = group_on_w(&pair, Slot::Second, &h, &group_on_w(&pair, Slot::First, &g, &w));
            let b = group_on_w(&pair, Slot::First, &g, &group_on_w(&pair, Slot::Second, &h, &w));
            assert_eq!(a, b, "{pair}");
        }
    }
}
