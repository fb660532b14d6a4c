//! Moment maps, compatible triples `(w, x, x')`, the infinitesimal `alpha`,
//! and brute-force checks of the fibre geometry in the stable range.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exactlin::{inverse, rank, solve_unique, LinError, Matrix, Scalar};
use crate::model::{self, random_factor_element};
use crate::orbits::{classify, dim_at, dim_orbit, representative, Orbit, OrbitError, PPoint};
use crate::pairs::{Case, DualPairSpec, FactorKind, Side, Slot};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MomentError {
    #[error("pair {0} is not in the stable range")]
    NotStableRange(String),
    #[error("orbit must lie on the smaller member (side G)")]
    WrongSide,
    #[error("block shapes do not match {0}")]
    Shape(String),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WPoint {
    pub pair: DualPairSpec,
    pub blocks: Vec<Matrix>,
}

impl WPoint {
    pub fn new(pair: DualPairSpec, blocks: Vec<Matrix>) -> Result<Self, MomentError> {
        let shapes = pair.w_blocks();
        let ok = shapes.len() == blocks.len()
            && shapes.iter().zip(&blocks).all(|(s, m)| m.shape() == (s.rows, s.cols));
        if !ok {
            return Err(MomentError::Shape(pair.to_string()));
        }
        Ok(WPoint { pair, blocks })
    }

    pub fn zero(pair: DualPairSpec) -> Self {
        let blocks = pair.w_blocks().iter().map(|b| Matrix::zeros(b.rows, b.cols)).collect();
        WPoint { pair, blocks }
    }

    pub fn coords(&self) -> Vec<Scalar> {
        model::w_coords(&self.blocks)
    }
}

fn moment_at(w: &WPoint, side: Side) -> PPoint {
    let slot = w.pair.slot_of(side);
    PPoint::new(w.pair, side, model::moment(&w.pair, slot, &w.blocks))
}

pub fn phi(w: &WPoint) -> PPoint {
    moment_at(w, Side::G)
}

pub fn phi_prime(w: &WPoint) -> PPoint {
    moment_at(w, Side::GPrime)
}

/// The rank each block must reach for `w` to lie in `W°`.
fn full_ranks(pair: &DualPairSpec) -> Vec<usize> {
    let v = pair.params();
    match (pair.case, pair.smaller) {
        (Case::R, Slot::First) | (Case::H, Slot::First) => vec![v[0], v[0]],
        (Case::R, Slot::Second) => vec![v[1], v[2]],
        (Case::H, Slot::Second) => vec![2 * v[1], 2 * v[2]],
        (Case::C, Slot::First) => vec![v[0], v[1], v[0], v[1]],
        (Case::C, Slot::Second) => vec![v[2], v[2], v[3], v[3]],
        (Case::CxSpO, Slot::First) => vec![2 * v[0]],
        (Case::CxSpO, Slot::Second) => vec![v[1]],
    }
}

/// Every block has the largest rank its shape allows.
pub fn is_full_rank(w: &WPoint) -> bool {
    w.blocks.iter().all(|m| m.rank() == m.rows().min(m.cols()))
}

/// `w` together with `x = phi(w)`, `x' = phi'(w)`, the stabilizers `k_x`,
/// `k'_{x'}` (as operators on the defining modules) and the matrix of
/// `dalpha: k'_{x'} -> k_x` in those bases.
#[derive(Clone, Debug)]
pub struct StabilizerMap {
    pub w: WPoint,
    pub x: PPoint,
    pub xprime: PPoint,
    pub k_x: Vec<Matrix>,
    pub kprime_xprime: Vec<Matrix>,
    pub dalpha: Matrix,
}

impl StabilizerMap {
    /// `dalpha` applied to the `j`-th basis element of `k'_{x'}`, as an operator.
    pub fn dalpha_of(&self, j: usize) -> Matrix {
        self.k_x_element(&self.dalpha.col(j))
    }

    /// The element of `k_x` with the given coordinates.
    pub fn k_x_element(&self, coeffs: &[Scalar]) -> Matrix {
        if self.k_x.is_empty() {
            let n = self.x.member().size();
            return Matrix::zeros(n, n);
        }
        model::combine(&self.k_x, coeffs)
    }
}

fn upper_half(s: &Matrix, strict: bool) -> Matrix {
    let n = s.rows();
    Matrix::from_fn(n, n, |r, c| {
        if r < c {
            s[(r, c)].clone()
        } else if r == c && !strict {
            s[(r, c)].div(&Scalar::int(2))
        } else {
            Scalar::zero()
        }
    })
}

fn pad_rows(m: &Matrix, rows: usize) -> Matrix {
    let mut out = Matrix::zeros(rows, m.cols());
    out.set_block(0, 0, m);
    out
}

fn pad_cols(m: &Matrix, cols: usize) -> Matrix {
    let mut out = Matrix::zeros(m.rows(), cols);
    out.set_block(0, 0, m);
    out
}

/// Full-rank `A` (`p x n`, `p >= 2n`) with `A^T A = s`: `A = [I + R/2; i(I - R/2)]`
/// where `R + R^T = s`.
fn sym_square_root(s: &Matrix, p: usize) -> Matrix {
    let n = s.rows();
    let half = upper_half(s, false).scale(&Scalar::frac(1, 2));
    let id = Matrix::identity(n);
    let top = id.add(&half);
    let bottom = id.sub(&half).scale(&Scalar::i());
    pad_rows(&Matrix::vstack(&[&top, &bottom]), p)
}

/// Full-rank `A` (`2p x n`, `p >= n`) with `A^T J_2p A = s` for alternating `s`.
fn alt_square_root(s: &Matrix, p: usize) -> Matrix {
    let n = s.rows();
    let top = pad_rows(&Matrix::identity(n), p);
    let bottom = pad_rows(&upper_half(s, true), p);
    Matrix::vstack(&[&top, &bottom])
}

/// `(L, R)` with `L R^T = m`: `L = [I, 0]` and `R = [m^T, I, 0]`.
fn split_identity(m: &Matrix, width_l: usize, width_r: usize) -> (Matrix, Matrix) {
    let (a, b) = m.shape();
    let l = pad_cols(&Matrix::identity(a), width_l);
    let mut r = Matrix::zeros(b, width_r);
    r.set_block(0, 0, &m.transpose());
    r.set_block(0, a, &Matrix::identity(b));
    (l, r)
}

/// A point `w` of `W°` with `phi(w) = representative(o)` (side G is the smaller member).
pub fn construct_w_at(pair: &DualPairSpec, x: &PPoint) -> Result<WPoint, MomentError> {
    if !pair.stable_range() {
        return Err(MomentError::NotStableRange(pair.to_string()));
    }
    if x.side != Side::G {
        return Err(MomentError::WrongSide);
    }
    let v = pair.params();
    let b = &x.blocks;
    let blocks = match (pair.case, pair.smaller) {
        (Case::R, Slot::First) => vec![sym_square_root(&b[0], v[1]), sym_square_root(&b[1], v[2])],
        (Case::R, Slot::Second) | (Case::H, Slot::Second) => {
            let (a, bb) = split_identity(&b[0], v[0], v[0]);
            vec![a, bb]
        }
        (Case::C, Slot::First) => {
            // A = [I;0], B = [X1; I; 0]; D = [I; 0], C = [X2; I; 0].
            let (n1, n2, p, q) = (v[0], v[1], v[2], v[3]);
            let a = pad_rows(&Matrix::identity(n1), p);
            let bb = pad_rows(&Matrix::vstack(&[&b[0], &Matrix::identity(n2)]), p);
            let d = pad_rows(&Matrix::identity(n2), q);
            let c = pad_rows(&Matrix::vstack(&[&b[1], &Matrix::identity(n1)]), q);
            vec![a, bb, c, d]
        }
        (Case::C, Slot::Second) => {
            // A C^T = Y1 and D B^T = Y2.
            let (n1, n2) = (v[0], v[1]);
            let (a, c) = split_identity(&b[0], n1, n1);
            let (d, bb) = split_identity(&b[1], n2, n2);
            vec![a, bb, c, d]
        }
        (Case::H, Slot::First) => vec![alt_square_root(&b[0], v[1]), alt_square_root(&b[1], v[2])],
        (Case::CxSpO, Slot::First) => vec![sym_square_root(&b[0], v[1])],
        (Case::CxSpO, Slot::Second) => {
            // A = [I, 0 | R, 0] with A J A^T = R^T - R = x for R = -(strict upper part of x).
            let (n, p) = (v[0], v[1]);
            let left = pad_cols(&Matrix::identity(p), n);
            let right = pad_cols(&upper_half(&b[0], true).neg(), n);
            vec![Matrix::hstack(&[&left, &right])]
        }
    };
    let w = WPoint::new(*pair, blocks)?;
    debug_assert_eq!(phi(&w).blocks, x.blocks);
    Ok(w)
}

pub fn construct_w(o: &Orbit) -> Result<StabilizerMap, MomentError> {
    if o.side != Side::G {
        return Err(MomentError::WrongSide);
    }
    let x = representative(o);
    let w = construct_w_at(&o.pair, &x)?;
    stabilizer_map(&w)
}

/// Columns: `Z_i . w` for a basis `Z_i` of `k` of the member in `slot`.
pub fn tangent_matrix(w: &WPoint, slot: Slot, basis: &[Matrix]) -> Matrix {
    let cols: Vec<Vec<Scalar>> = basis
        .iter()
        .map(|z| model::w_coords(&model::lie_on_w(&w.pair, slot, z, &w.blocks)))
        .collect();
    Matrix::from_fn(w.pair.dim_w(), basis.len(), |r, c| cols[c][r].clone())
}

/// Builds the full triple at `w`; `dalpha(X')` is the unique `Z` in `k` with `Z.w = -X'.w`.
pub fn stabilizer_map(w: &WPoint) -> Result<StabilizerMap, MomentError> {
    let pair = w.pair;
    let (sg, sgp) = (pair.slot_of(Side::G), pair.slot_of(Side::GPrime));
    let x = phi(w);
    let xprime = phi_prime(w);
    let k_x = model::stabilizer_basis(x.member(), &x.blocks);
    let kprime_xprime = model::stabilizer_basis(xprime.member(), &xprime.blocks);
    let act = tangent_matrix(w, sg, &k_x);
    let mut cols = Vec::with_capacity(kprime_xprime.len());
    for xp in &kprime_xprime {
        let rhs: Vec<Scalar> = model::w_coords(&model::lie_on_w(&pair, sgp, xp, &w.blocks)).iter().map(|s| -s).collect();
        cols.push(solve_unique(&act, &rhs)?);
    }
    let dalpha = Matrix::from_fn(k_x.len(), kprime_xprime.len(), |r, c| cols[c][r].clone());
    Ok(StabilizerMap { w: w.clone(), x, xprime, k_x, kprime_xprime, dalpha })
}

/// `Z . w = 0` only for `Z = 0`: the stabilizer of `w` in `k` is trivial.
pub fn k_acts_freely(w: &WPoint) -> bool {
    let slot = w.pair.slot_of(Side::G);
    let basis = model::k_basis(w.pair.member(slot));
    tangent_matrix(w, slot, &basis).rank() == basis.len()
}

/// Solves `g . w = target` for `g` in `K_C` (side G) from the equations linear in `g`,
/// then checks the remaining ones. `None` if no unique solution exists or it fails a check.
pub fn solve_k_element(w: &WPoint, target: &WPoint) -> Option<Matrix> {
    let pair = w.pair;
    let slot = pair.slot_of(Side::G);
    let member = pair.member(slot);
    let factors = member.factors();
    let sizes: Vec<usize> = factors.iter().map(|f| f.kind.size()).collect();
    let unknowns: usize = sizes.iter().map(|s| s * s).sum();
    let (a, t) = (&w.blocks, &target.blocks);
    // Linear residual pieces `lhs(g) - rhs`, one per block that transforms by `g` itself.
    let lhs = |g: &[Matrix]| -> Vec<Matrix> {
        match (pair.case, slot) {
            (Case::R, Slot::First) | (Case::H, Slot::First) => vec![a[0].mul(&g[0].transpose())],
            (Case::R, Slot::Second) | (Case::H, Slot::Second) => vec![g[0].mul(&a[0]), g[1].mul(&a[1])],
            (Case::C, Slot::First) => vec![a[0].mul(&g[0].transpose()), a[3].mul(&g[1].transpose())],
            (Case::C, Slot::Second) => vec![g[0].mul(&a[0]), g[1].mul(&a[3])],
            (Case::CxSpO, Slot::First) => vec![t[0].mul(&g[0])],
            (Case::CxSpO, Slot::Second) => vec![g[0].mul(&a[0])],
        }
    };
    let rhs: Vec<Matrix> = match (pair.case, slot) {
        (Case::R, Slot::First) | (Case::H, Slot::First) => vec![t[0].clone()],
        (Case::R, Slot::Second) | (Case::H, Slot::Second) => vec![t[0].clone(), t[1].clone()],
        (Case::C, _) => vec![t[0].clone(), t[3].clone()],
        (Case::CxSpO, Slot::First) => vec![a[0].clone()],
        (Case::CxSpO, Slot::Second) => vec![t[0].clone()],
    };
    let unit = |k: usize| -> Vec<Matrix> {
        let mut off = 0;
        sizes
            .iter()
            .map(|&s| {
                let mut m = Matrix::zeros(s, s);
                if k >= off && k < off + s * s {
                    let e = k - off;
                    m[(e / s, e % s)] = Scalar::one();
                }
                off += s * s;
                m
            })
            .collect()
    };
    let cols: Vec<Vec<Scalar>> = (0..unknowns).map(|k| model::w_coords(&lhs(&unit(k)))).collect();
    let rows = cols.first().map_or(0, Vec::len);
    let m = Matrix::from_fn(rows, unknowns, |r, c| cols[c][r].clone());
    let sol = solve_unique(&m, &model::w_coords(&rhs)).ok()?;
    let mut off = 0;
    let mut g = Matrix::identity(member.size());
    for (f, &s) in factors.iter().zip(&sizes) {
        let gf = Matrix::from_flat(s, s, sol[off..off + s * s].to_vec());
        off += s * s;
        inverse(&gf)?;
        if !model::is_factor_group_element(f.kind, &gf) {
            return None;
        }
        g = g.mul(&model::embed_group(member, f, &gf));
    }
    (model::group_on_w(&pair, slot, &g, &w.blocks) == target.blocks).then_some(g)
}

/// `(L, R)` with `L R^T = m`, `L` spanning the column space of `m` through a random basis.
fn random_factorization(m: &Matrix, rng: &mut ChaCha8Rng) -> Option<(Matrix, Matrix)> {
    let r = m.rank();
    let (_, piv) = crate::exactlin::rref(m);
    let basis = m.select_columns(&piv);
    debug_assert_eq!(basis.cols(), r);
    let g = random_factor_element(FactorKind::GL(r), rng);
    let l = basis.mul(&g);
    // Solve L Y = m column by column; L has full column rank.
    let mut y = Matrix::zeros(r, m.cols());
    for c in 0..m.cols() {
        let sol = solve_unique(&l, &m.col(c)).ok()?;
        for (k, s) in sol.into_iter().enumerate() {
            y[(k, c)] = s;
        }
    }
    Some((l, y.transpose()))
}

/// An independent point of `phi'^{-1}(x')` built by factoring `x'` from scratch,
/// where `phi'` is bilinear in two groups of blocks.
fn ansatz_sample(w: &WPoint, xprime: &PPoint, rng: &mut ChaCha8Rng) -> Option<WPoint> {
    let pair = w.pair;
    let v = pair.params();
    let b = &xprime.blocks;
    let blocks = match (pair.case, pair.smaller) {
        (Case::R, Slot::First) | (Case::H, Slot::First) => {
            if b[0].rank() != v[0] {
                return None;
            }
            let (a, bb) = random_factorization(&b[0], rng)?;
            vec![a, bb]
        }
        (Case::C, Slot::First) => {
            // A C^T = Y1, D B^T = Y2.
            if b[0].rank() != v[0] || b[1].rank() != v[1] {
                return None;
            }
            let (a, c) = random_factorization(&b[0], rng)?;
            let (d, bb) = random_factorization(&b[1], rng)?;
            vec![a, bb, c, d]
        }
        (Case::C, Slot::Second) => {
            // A^T B = X1, D^T C = X2: factor the transposes.
            if b[0].rank() != v[2] || b[1].rank() != v[3] {
                return None;
            }
            let (bt, at) = random_factorization(&b[0].transpose(), rng)?;
            let (ct, dt) = random_factorization(&b[1].transpose(), rng)?;
            vec![at.transpose(), bt.transpose(), ct.transpose(), dt.transpose()]
        }
        _ => return None,
    };
    let s = WPoint::new(pair, blocks).ok()?;
    (phi_prime(&s).blocks == xprime.blocks).then_some(s)
}

fn cayley(y: &Matrix) -> Option<Matrix> {
    let id = Matrix::identity(y.rows());
    Some(id.sub(y).mul(&inverse(&id.add(y))?))
}

/// A point `k'.w` with `k'` in the stabilizer of `x'` in `K'_C`, via the Cayley
/// transform of a random element of `k'_{x'}`.
fn stabilizer_sample(sm: &StabilizerMap, rng: &mut ChaCha8Rng) -> Option<WPoint> {
    use rand::Rng;
    let pair = sm.w.pair;
    let coeffs: Vec<Scalar> = sm.kprime_xprime.iter().map(|_| Scalar::int(rng.gen_range(-2..=2))).collect();
    let n = sm.xprime.member().size();
    let y = if sm.kprime_xprime.is_empty() { Matrix::zeros(n, n) } else { model::combine(&sm.kprime_xprime, &coeffs) };
    // For GL factors I - Y can be singular even when I + Y is not.
    let k = cayley(&y).filter(|k| inverse(k).is_some())?;
    let slot = pair.slot_of(Side::GPrime);
    Some(WPoint { pair, blocks: model::group_on_w(&pair, slot, &k, &sm.w.blocks) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub pair: String,
    pub orbit: String,
    pub check: String,
    pub samples: usize,
    pub seed: u64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl FiberReport {
    pub fn passed(&self) -> bool {
        self.status == "PASS"
    }
}

/// Samples points of `phi'^{-1}(x') ∩ W°` and certifies for each that it is
/// `g . w` for a unique explicit `g` in `K_C`, and that its image under `phi`
/// classifies to `o`.
pub fn verify_fiber_single_orbit(o: &Orbit, samples: usize, seed: u64) -> Result<FiberReport, MomentError> {
    let pair = o.pair;
    if !pair.stable_range() {
        return Err(MomentError::NotStableRange(pair.to_string()));
    }
    let sm = construct_w(o)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FiberReport {
        pair: pair.to_string(),
        orbit: o.to_string(),
        check: "fiber-single-orbit".into(),
        samples: 0,
        seed,
        status: "PASS".into(),
        counterexample: None,
    };
    let mut tries = 0;
    while report.samples < samples && tries < 20 * samples.max(1) {
        tries += 1;
        let s = if report.samples % 2 == 0 {
            ansatz_sample(&sm.w, &sm.xprime, &mut rng).or_else(|| stabilizer_sample(&sm, &mut rng))
        } else {
            stabilizer_sample(&sm, &mut rng)
        };
        let Some(s) = s else { continue };
        if !is_full_rank(&s) || phi_prime(&s).blocks != sm.xprime.blocks {
            continue;
        }
        report.samples += 1;
        let fail = |why: &str| Some(format!("{why}: w = {:?}", s.blocks.iter().map(|m| m.to_string()).collect::<Vec<_>>()));
        let bad = if solve_k_element(&sm.w, &s).is_none() {
            fail("no unique K_C element maps w to the sample")
        } else {
            match classify(&phi(&s)) {
                Ok(c) if c == *o => None,
                Ok(c) => fail(&format!("phi(sample) lies in {c}")),
                Err(e) => fail(&e.to_string()),
            }
        };
        if bad.is_some() {
            report.status = "FAIL".into();
            report.counterexample = bad;
            break;
        }
    }
    Ok(report)
}

/// `(dim theta(O), dim O + dim W - dim p - dim k)`, with the left side computed
/// at `x' = phi'(w)`.
pub fn theta_dim_identity(o: &Orbit) -> Result<(usize, usize), MomentError> {
    let sm = construct_w(o)?;
    let pair = o.pair;
    let g = pair.side_member(Side::G);
    let lhs = dim_at(&sm.xprime);
    let rhs = dim_orbit(o) + pair.dim_w() - g.dim_p() - g.dim_k();
    Ok((lhs, rhs))
}

/// Dimension of `{A in M_{p,n} : A^T A = 0, rank A = r}`.
fn iso_sym(p: usize, n: usize, r: usize) -> Option<usize> {
    (r <= n && 2 * r <= p).then(|| r * n + r * (p - r) - r * (r + 1) / 2)
}

/// Dimension of `{A in M_{m,n} : columns span an isotropic r-space of a symplectic C^m}`.
fn iso_skew(m: usize, n: usize, r: usize) -> Option<usize> {
    (r <= n && 2 * r <= m).then(|| r * n + r * (m - r) - r * (r.saturating_sub(1)) / 2)
}

/// Dimension of `{(A, B) in M_{a,m} x M_{b,m} : A B^T = 0, rank A = r1, rank B = r2}`.
fn orth_pair(a: usize, b: usize, m: usize, r1: usize, r2: usize) -> Option<usize> {
    (r1 <= a && r2 <= b && r1 + r2 <= m).then(|| r1 * (m - r1) + a * r1 + r2 * (m - r1 - r2) + b * r2)
}

/// Rank strata of the null cone `phi^{-1}(0)`: `(ranks, dimension)`.
pub fn null_cone_strata(pair: &DualPairSpec) -> Vec<(Vec<usize>, usize)> {
    let v = pair.params();
    let full = full_ranks(pair);
    let mut out = Vec::new();
    let mut ranks = vec![0; full.len()];
    loop {
        let r = &ranks;
        let d = match (pair.case, pair.smaller) {
            (Case::R, Slot::First) => iso_sym(v[1], v[0], r[0]).zip(iso_sym(v[2], v[0], r[1])).map(|(a, b)| a + b),
            (Case::R, Slot::Second) => orth_pair(v[1], v[2], v[0], r[0], r[1]),
            (Case::C, Slot::First) => orth_pair(v[0], v[1], v[2], r[0], r[1])
                .zip(orth_pair(v[1], v[0], v[3], r[3], r[2]))
                .map(|(a, b)| a + b),
            (Case::C, Slot::Second) => orth_pair(v[2], v[3], v[0], r[0], r[2])
                .zip(orth_pair(v[3], v[2], v[1], r[3], r[1]))
                .map(|(a, b)| a + b),
            (Case::H, Slot::First) => iso_skew(2 * v[1], v[0], r[0]).zip(iso_skew(2 * v[2], v[0], r[1])).map(|(a, b)| a + b),
            (Case::H, Slot::Second) => orth_pair(2 * v[1], 2 * v[2], v[0], r[0], r[1]),
            (Case::CxSpO, Slot::First) => iso_sym(v[1], 2 * v[0], r[0]),
            (Case::CxSpO, Slot::Second) => iso_skew(2 * v[0], v[1], r[0]),
        };
        if let Some(d) = d {
            out.push((ranks.clone(), d));
        }
        let mut k = 0;
        loop {
            if k == ranks.len() {
                return out;
            }
            ranks[k] += 1;
            if ranks[k] <= full[k] {
                break;
            }
            ranks[k] = 0;
            k += 1;
        }
    }
}

/// `(dim of the null cone, dim of its non-full-rank part)`.
pub fn null_cone_dims(pair: &DualPairSpec) -> (usize, Option<usize>) {
    let full = full_ranks(pair);
    let strata = null_cone_strata(pair);
    let top = strata.iter().map(|s| s.1).max().unwrap_or(0);
    let boundary = strata.iter().filter(|(r, _)| *r != full).map(|s| s.1).max();
    (top, boundary)
}

/// Whether some `w` outside `W°` maps into `o`: a block can drop rank exactly
/// when the component of `x` it controls has rank below the block's full rank.
pub fn boundary_nonempty(o: &Orbit) -> bool {
    let pair = o.pair;
    let x = representative(o);
    let full = full_ranks(&pair);
    let b = &x.blocks;
    let controls: Vec<usize> = match (pair.case, pair.smaller) {
        (Case::R, Slot::First) | (Case::H, Slot::First) => vec![rank(&b[0]), rank(&b[1])],
        (Case::R, Slot::Second) | (Case::H, Slot::Second) => vec![rank(&b[0]), rank(&b[0])],
        (Case::C, Slot::First) => vec![rank(&b[0]), rank(&b[0]), rank(&b[1]), rank(&b[1])],
        (Case::C, Slot::Second) => vec![rank(&b[0]), rank(&b[1]), rank(&b[0]), rank(&b[1])],
        (Case::CxSpO, _) => vec![rank(&b[0])],
    };
    controls.iter().zip(&full).any(|(c, f)| c < f)
}

/// Certified lower bound `dim N̄ - dim ∂N` for `codim(Y, ∂Z°)`; `None` when `∂Z°` is empty.
pub fn codim_boundary(o: &Orbit) -> Result<Option<usize>, MomentError> {
    if !o.pair.stable_range() {
        return Err(MomentError::NotStableRange(o.pair.to_string()));
    }
    if o.side != Side::G {
        return Err(MomentError::WrongSide);
    }
    if !boundary_nonempty(o) {
        return Ok(None);
    }
    let (top, boundary) = null_cone_dims(&o.pair);
    Ok(Some(top - boundary.unwrap_or(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::enumerate_orbits;
    use crate::pairs::registered_small_pairs;

    fn stable_pairs() -> Vec<DualPairSpec> {
        registered_small_pairs().into_iter().filter(DualPairSpec::stable_range).collect()
    }

    fn ints(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    fn gauss_col(v: &[(i64, i64)]) -> Matrix {
        Matrix::from_rows(v.iter().map(|&(a, b)| vec![Scalar::gauss(a, b)]).collect())
    }

    #[test]
    fn moment_map_examples() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let iso = gauss_col(&[(1, 0), (0, 1)]);
        let w = WPoint::new(pair, vec![iso.clone(), iso.clone()]).unwrap();
        assert_eq!(phi(&w).blocks, vec![ints(&[&[0]]), ints(&[&[0]])]);
        let expect = Matrix::from_rows(vec![
            vec![Scalar::one(), Scalar::i()],
            vec![Scalar::i(), Scalar::int(-1)],
        ]);
        assert_eq!(phi_prime(&w).blocks, vec![expect]);
        assert!(is_full_rank(&w));
        let w2 = WPoint::new(pair, vec![ints(&[&[1], &[0]]), ints(&[&[0], &[0]])]).unwrap();
        assert_eq!(phi(&w2).blocks, vec![ints(&[&[1]]), ints(&[&[0]])]);
        assert!(phi_prime(&w2).blocks[0].is_zero());
        assert!(!is_full_rank(&WPoint::zero(pair)));
        assert!(phi(&WPoint::zero(pair)).blocks.iter().all(Matrix::is_zero));
    }

    #[test]
    fn construct_w_on_every_stable_pair() {
        for pair in stable_pairs() {
            for o in enumerate_orbits(&pair, Side::G).unwrap() {
                let sm = construct_w(&o).unwrap();
                assert!(is_full_rank(&sm.w), "{pair} {o}");
                assert!(k_acts_freely(&sm.w), "{pair} {o}");
                assert_eq!(classify(&sm.x).unwrap(), o);
                // Defining invariant of dalpha.
                for (j, xp) in sm.kprime_xprime.iter().enumerate() {
                    let lhs = model::lie_on_w(&pair, pair.slot_of(Side::GPrime), xp, &sm.w.blocks);
                    let rhs = model::lie_on_w(&pair, pair.slot_of(Side::G), &sm.dalpha_of(j), &sm.w.blocks);
                    let sum: Vec<Matrix> = lhs.iter().zip(&rhs).map(|(a, b)| a.add(b)).collect();
                    assert!(sum.iter().all(Matrix::is_zero));
                }
            }
        }
    }

    #[test]
    fn dalpha_is_a_homomorphism_onto_k_x() {
        for pair in stable_pairs() {
            for o in enumerate_orbits(&pair, Side::G).unwrap() {
                let sm = construct_w(&o).unwrap();
                let n = sm.kprime_xprime.len();
                for i in 0..n {
                    for j in 0..n {
                        let br = sm.kprime_xprime[i].commutator(&sm.kprime_xprime[j]);
                        let flat: Vec<Vec<Scalar>> = sm.kprime_xprime.iter().map(Matrix::flatten).collect();
                        let coeffs = crate::exactlin::coordinates(&flat, &br.flatten()).unwrap();
                        let image = sm.k_x_element(&sm.dalpha.apply(&coeffs));
                        assert_eq!(image, sm.dalpha_of(i).commutator(&sm.dalpha_of(j)), "{pair} {o}");
                    }
                }
                assert_eq!(sm.dalpha.rank(), sm.k_x.len(), "dalpha onto k_x for {pair} {o}");
            }
        }
    }

    #[test]
    fn spec_examples_for_construct_w() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        let zero = Orbit::zero(pair, Side::G);
        let sm = construct_w(&zero).unwrap();
        assert!(sm.x.blocks.iter().all(Matrix::is_zero));
        assert_eq!(sm.xprime.blocks[0].rank(), 1);
        let a = Orbit::parse(pair, Side::G, "-+").unwrap();
        let sm = construct_w(&a).unwrap();
        assert_eq!(sm.x.blocks, vec![ints(&[&[1]]), ints(&[&[0]])]);
        assert_eq!(sm.xprime.blocks[0].rank(), 1);
    }

    #[test]
    fn fibers_are_single_orbits() {
        for pair in stable_pairs() {
            for o in enumerate_orbits(&pair, Side::G).unwrap() {
                let r = verify_fiber_single_orbit(&o, 6, 42).unwrap();
                assert!(r.passed(), "{r:?}");
                assert_eq!(r.samples, 6);
            }
        }
        let r1 = verify_fiber_single_orbit(&Orbit::zero(DualPairSpec::r(1, 2, 2, Slot::First), Side::G), 5, 9).unwrap();
        let r2 = verify_fiber_single_orbit(&Orbit::zero(DualPairSpec::r(1, 2, 2, Slot::First), Side::G), 5, 9).unwrap();
        assert_eq!(r1, r2);
        let bad = DualPairSpec::r(1, 1, 1, Slot::First);
        assert!(matches!(
            verify_fiber_single_orbit(&Orbit::zero(bad, Side::G), 1, 0),
            Err(MomentError::NotStableRange(_))
        ));
    }

    #[test]
    fn theta_dimension_identity() {
        let pair = DualPairSpec::r(1, 2, 2, Slot::First);
        assert_eq!(theta_dim_identity(&Orbit::zero(pair, Side::G)).unwrap(), (1, 1));
        for pair in stable_pairs() {
            for o in enumerate_orbits(&pair, Side::G).unwrap() {
                let (l, r) = theta_dim_identity(&o).unwrap();
                assert_eq!(l, r, "{pair} {o}");
            }
        }
    }

    #[test]
    fn null_cone_dimension_matches_flatness() {
        // The null cone has dimension dim W - dim p.
        for pair in stable_pairs() {
            let (top, _) = null_cone_dims(&pair);
            let g = pair.side_member(Side::G);
            assert_eq!(top, pair.dim_w() - g.dim_p(), "{pair}");
        }
    }

    #[test]
    fn boundary_codimension() {
        let zero = |p: DualPairSpec| codim_boundary(&Orbit::zero(p, Side::G)).unwrap();
        assert_eq!(zero(DualPairSpec::r(1, 3, 3, Slot::First)), Some(2));
        assert_eq!(zero(DualPairSpec::r(1, 2, 3, Slot::First)), Some(1));
        assert_eq!(zero(DualPairSpec::cx(1, 4, Slot::First)), Some(1));
        assert_eq!(zero(DualPairSpec::h(1, 1, 1, Slot::First)), Some(2));
        assert_eq!(zero(DualPairSpec::cx(1, 5, Slot::First)), Some(2));
        // At the edge of the range the rank-drop loci of the quadric factors
        // {a . b = 0} are divisors, so the bound is 1 although neither pair is on the codimension-one exclusion list.
        assert_eq!(zero(DualPairSpec::c(1, 1, 2, 2, Slot::First)), Some(1));
        assert_eq!(zero(DualPairSpec::r(2, 1, 1, Slot::Second)), Some(1));
        assert_eq!(zero(DualPairSpec::c(1, 1, 3, 3, Slot::First)), Some(2));
        assert_eq!(zero(DualPairSpec::r(3, 1, 1, Slot::Second)), Some(2));
        // The bound does not depend on the orbit.
        for pair in stable_pairs() {
            let (top, boundary) = null_cone_dims(&pair);
            for o in enumerate_orbits(&pair, Side::G).unwrap() {
                if let Some(c) = codim_boundary(&o).unwrap() {
                    assert_eq!(c, top - boundary.unwrap());
                }
            }
        }
    }

    #[test]
    fn orbit_of_w_has_expected_dimension() {
        // dim (K x K').w = dim O + dim null cone, from the two tangent maps at w.
        for pair in stable_pairs() {
            for o in enumerate_orbits(&pair, Side::G).unwrap() {
                let sm = construct_w(&o).unwrap();
                let (sg, sgp) = (pair.slot_of(Side::G), pair.slot_of(Side::GPrime));
                let t1 = tangent_matrix(&sm.w, sg, &model::k_basis(pair.member(sg)));
                let t2 = tangent_matrix(&sm.w, sgp, &model::k_basis(pair.member(sgp)));
                let both = Matrix::hstack(&[&t1, &t2]);
                let g = pair.side_member(Side::G);
                assert_eq!(both.rank(), dim_orbit(&o) + pair.dim_w() - g.dim_p(), "{pair} {o}");
            }
        }
    }
}
