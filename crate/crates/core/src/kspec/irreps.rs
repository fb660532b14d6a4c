//! Explicit irreducible modules of the factor Lie algebras, and multiplicities
//! of `K`-types in `Ind_{K_x}^K chi` at the level of Lie algebras.
//!
//! `V_lambda` is realized inside polynomials in `y_{ij}` (`i` a weight-basis index of
//! the defining module, `j < r`), generated by the product of leading minors
//! `prod_k Delta_k^(lambda_k - lambda_{k+1})`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::exactlin::{inverse, kernel, Matrix, Scalar};
use crate::lift::OrbitDatum;
use crate::model;
use crate::moment::construct_w;
use crate::orbits::Orbit;
use crate::pairs::{FactorKind, Member, Side};

use super::character::{Irrep, KGroup};
use super::frame::k_group;
use super::roots::{dimension, Laurent, RootType};
use super::series::harmonics;
use super::KspecError;

type Mono = Vec<u16>;
type Poly = BTreeMap<Mono, Scalar>;

fn poly_add_scaled(a: &mut Poly, b: &Poly, c: &Scalar) {
    for (m, v) in b {
        let t = v * c;
        let e = a.entry(m.clone()).or_insert_with(Scalar::zero);
        *e += &t;
        if e.is_zero() {
            a.remove(m);
        }
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, va) in a {
        for (mb, vb) in b {
            let m: Mono = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let t = va * vb;
            let e = out.entry(m.clone()).or_insert_with(Scalar::zero);
            *e += &t;
            if e.is_zero() {
                out.remove(&m);
            }
        }
    }
    out
}

/// Determinant of the leading `k x k` block of `y`, by Leibniz expansion.
fn leading_minor(k: usize, r: usize, nvars: usize) -> Poly {
    let mut out = Poly::new();
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        let mut inv = 0;
        for a in 0..k {
            for b in a + 1..k {
                if perm[a] > perm[b] {
                    inv += 1;
                }
            }
        }
        let mut m = vec![0u16; nvars];
        for (row, &col) in perm.iter().enumerate() {
            m[row * r + col] += 1;
        }
        out.insert(m, Scalar::int(if inv % 2 == 0 { 1 } else { -1 }));
        // Next permutation.
        let mut i = k;
        while i > 1 && perm[i - 2] >= perm[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            break;
        }
        let mut j = k - 1;
        while perm[j] <= perm[i - 2] {
            j -= 1;
        }
        perm.swap(i - 2, j);
        perm[i - 1..].reverse();
    }
    out
}

/// `D_X` on polynomials: `y_{ij} -> sum_k X_{ki} y_{kj}`.
fn derive(x: &Matrix, r: usize, p: &Poly) -> Poly {
    let n = x.rows();
    let mut out = Poly::new();
    for (m, c) in p {
        for i in 0..n {
            for j in 0..r {
                let e = m[i * r + j];
                if e == 0 {
                    continue;
                }
                let base = c * &Scalar::int(e as i64);
                for k in 0..n {
                    let xk = &x[(k, i)];
                    if xk.is_zero() {
                        continue;
                    }
                    let mut m2 = m.clone();
                    m2[i * r + j] -= 1;
                    m2[k * r + j] += 1;
                    let t = &base * xk;
                    let ent = out.entry(m2.clone()).or_insert_with(Scalar::zero);
                    *ent += &t;
                    if ent.is_zero() {
                        out.remove(&m2);
                    }
                }
            }
        }
    }
    out
}

/// The reflection of `O(2m)` on polynomials: swaps the rows of `z_{m-1}` and its conjugate.
fn reflect_poly(m: usize, r: usize, p: &Poly) -> Poly {
    p.iter()
        .map(|(mono, c)| {
            let mut out = mono.clone();
            for j in 0..r {
                out.swap((m - 1) * r + j, m * r + j);
            }
            (out, c.clone())
        })
        .collect()
}

/// Sparse elimination that remembers how each reduced row is made of the inserted vectors.
struct Span {
    rows: Vec<(Mono, Poly, Vec<Scalar>)>,
    count: usize,
}

impl Span {
    fn new() -> Self {
        Span { rows: Vec::new(), count: 0 }
    }

    /// Residual and coordinates of `v - residual` in the inserted vectors.
    fn reduce(&self, v: &Poly) -> (Poly, Vec<Scalar>) {
        let mut res = v.clone();
        let mut coords = vec![Scalar::zero(); self.count];
        for (piv, row, combo) in &self.rows {
            let Some(c) = res.get(piv).cloned() else { continue };
            let f = c.div(&row[piv]);
            poly_add_scaled(&mut res, row, &-&f);
            for (k, x) in combo.iter().enumerate() {
                coords[k] += &(x * &f);
            }
        }
        (res, coords)
    }

    fn insert(&mut self, v: &Poly) -> bool {
        let (res, coords) = self.reduce(v);
        let Some(piv) = res.keys().next_back().cloned() else { return false };
        self.count += 1;
        let mut combo: Vec<Scalar> = coords.into_iter().map(|c| -c).collect();
        combo.push(Scalar::one());
        for (_, _, c) in self.rows.iter_mut() {
            c.push(Scalar::zero());
        }
        self.rows.push((piv, res, combo));
        true
    }
}

/// A Lie-level irreducible of one factor, with its action available on any
/// element of the factor's Lie algebra.
#[derive(Clone, Debug)]
pub struct FactorModule {
    pub kind: FactorKind,
    pub highest: Vec<i32>,
    pub dim: usize,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Trivial,
    /// `O(2)` with `k >= 1`: weights `k` and `-k`.
    Circle(i32),
    Poly { p: Matrix, pinv: Matrix, r: usize, basis: Vec<Poly>, span_rows: Vec<(Mono, Poly, Vec<Scalar>)>, shift: i32 },
}

impl FactorModule {
    pub fn new(kind: FactorKind, highest: &[i32]) -> Result<Self, KspecError> {
        let t = RootType::of(kind)?;
        if highest.len() != t.rank() || !t.is_dominant(highest) {
            return Err(KspecError::Label(format!("{highest:?} is not a dominant weight of {kind}")));
        }
        let expected = dimension(t, highest) as usize;
        let repr = match t {
            RootType::Rank0 => Repr::Trivial,
            RootType::O2 if highest[0] == 0 => Repr::Trivial,
            RootType::O2 => Repr::Circle(highest[0]),
            _ => {
                let shift = if let RootType::A(_) = t { *highest.last().unwrap_or(&0) } else { 0 };
                let mu: Vec<i32> = highest.iter().map(|x| x - shift).collect();
                let r = mu.iter().filter(|&&x| x > 0).count();
                let n = kind.size();
                let nvars = n * r.max(1);
                let mut v: Poly = [(vec![0u16; nvars], Scalar::one())].into_iter().collect();
                for k in 1..=r {
                    let e = mu[k - 1] - mu.get(k).copied().unwrap_or(0);
                    let delta = leading_minor(k, r, nvars);
                    for _ in 0..e {
                        v = poly_mul(&v, &delta);
                    }
                }
                let p = model::factor_weight_basis(kind);
                let pinv = inverse(&p).expect("weight basis");
                let lie: Vec<Matrix> = model::factor_lie_basis(kind).iter().map(|x| pinv.mul(x).mul(&p)).collect();
                let mut span = Span::new();
                let mut basis = Vec::new();
                let mut queue = VecDeque::new();
                let mut seeds = vec![v];
                if let RootType::D(m) = t {
                    // The conjugate highest weight vector generates the other so_{2m} constituent.
                    seeds.push(reflect_poly(m, r.max(1), &seeds[0]));
                }
                for v in seeds {
                    if span.insert(&v) {
                        basis.push(v.clone());
                        queue.push_back(v);
                    }
                }
                while let Some(b) = queue.pop_front() {
                    for x in &lie {
                        let d = derive(x, r.max(1), &b);
                        if span.insert(&d) {
                            basis.push(d.clone());
                            queue.push_back(d);
                        }
                    }
                    if basis.len() > expected {
                        break;
                    }
                }
                Repr::Poly { p, pinv, r: r.max(1), basis, span_rows: span.rows, shift }
            }
        };
        let dim = match &repr {
            Repr::Trivial => 1,
            Repr::Circle(_) => 2,
            Repr::Poly { basis, .. } => basis.len(),
        };
        if dim != expected {
            return Err(KspecError::Decomposition(format!("{kind} module {highest:?} has dimension {dim}, expected {expected}")));
        }
        Ok(FactorModule { kind, highest: highest.to_vec(), dim, repr })
    }

    /// Matrix of `Z` (in the defining representation) on the module.
    pub fn action(&self, z: &Matrix) -> Matrix {
        match &self.repr {
            Repr::Trivial => Matrix::zeros(1, 1),
            Repr::Circle(k) => {
                let p = model::factor_weight_basis(self.kind);
                let zw = inverse(&p).expect("weight basis").mul(z).mul(&p);
                let c = &zw[(0, 0)] * &Scalar::int(*k as i64);
                let mut m = Matrix::zeros(2, 2);
                m[(1, 1)] = -&c;
                m[(0, 0)] = c;
                m
            }
            Repr::Poly { p, pinv, r, basis, span_rows, shift } => {
                let zw = pinv.mul(z).mul(p);
                let span = Span { rows: span_rows.clone(), count: basis.len() };
                let n = basis.len();
                let mut m = Matrix::zeros(n, n);
                for (c, b) in basis.iter().enumerate() {
                    let (res, coords) = span.reduce(&derive(&zw, *r, b));
                    debug_assert!(res.is_empty(), "module is closed under the action");
                    for (row, x) in coords.into_iter().enumerate() {
                        m[(row, c)] = x;
                    }
                }
                if *shift != 0 {
                    let t = &z.trace() * &Scalar::int(*shift as i64);
                    m = m.add(&Matrix::identity(n).scale(&t));
                }
                m
            }
        }
    }
}

/// Trace of `r t` on the `O(2m)` irreducible with `lambda_m = 0` and trivial-type
/// parity, as a function of the torus fixed by `r` (last coordinate 0).
pub(crate) fn reflection_trace(kind: FactorKind, lambda: &[i32]) -> Laurent {
    let m = kind.rank();
    let module = cached_module(kind, lambda).expect("valid O(2m) weight");
    let Repr::Poly { r, basis, .. } = &module.repr else { unreachable!("O(2m) modules are polynomial") };
    let a = kind.size();
    let row_weight = |i: usize| -> (usize, i32) { if i < m { (i, 1) } else { (a - 1 - i, -1) } };
    let weight_of = |mono: &Mono| -> Vec<i32> {
        let mut w = vec![0; m];
        for (idx, &e) in mono.iter().enumerate() {
            if e > 0 {
                let (k, s) = row_weight(idx / r);
                w[k] += s * e as i32;
            }
        }
        w
    };
    // Components of the basis in each fixed weight.
    let mut comps: BTreeMap<Vec<i32>, Vec<Poly>> = BTreeMap::new();
    for b in basis {
        let mut split: BTreeMap<Vec<i32>, Poly> = BTreeMap::new();
        for (mono, c) in b {
            split.entry(weight_of(mono)).or_default().insert(mono.clone(), c.clone());
        }
        for (w, p) in split {
            if w[m - 1] == 0 {
                comps.entry(w).or_default().push(p);
            }
        }
    }
    let mut out = Laurent::new();
    for (w, polys) in comps {
        let mut span = Span::new();
        let mut chosen = Vec::new();
        for p in &polys {
            if span.insert(p) {
                chosen.push(p.clone());
            }
        }
        let mut tr = Scalar::zero();
        for (k, p) in chosen.iter().enumerate() {
            let (res, coords) = span.reduce(&reflect_poly(m, *r, p));
            debug_assert!(res.is_empty());
            tr += &coords[k];
        }
        let tr = tr.to_i64_pair().expect("integral trace");
        if tr.0 != 0 {
            out.insert(w, tr.0);
        }
    }
    out
}

fn cached_module(kind: FactorKind, highest: &[i32]) -> Result<FactorModule, KspecError> {
    static CACHE: OnceLock<Mutex<HashMap<(FactorKind, Vec<i32>), FactorModule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (kind, highest.to_vec());
    if let Some(m) = cache.lock().expect("module cache").get(&key) {
        return Ok(m.clone());
    }
    let m = FactorModule::new(kind, highest)?;
    cache.lock().expect("module cache").insert(key, m.clone());
    Ok(m)
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |r, c| &a[(r / br, c / bc)] * &b[(r % br, c % bc)])
}

/// Kronecker sum of per-factor actions.
fn kron_sum(locals: &[Matrix]) -> Matrix {
    let dims: Vec<usize> = locals.iter().map(|m| m.rows()).collect();
    let total: usize = dims.iter().product();
    let mut out = Matrix::zeros(total, total);
    for (f, local) in locals.iter().enumerate() {
        let mut term = Matrix::identity(1);
        for (g, d) in dims.iter().enumerate() {
            term = if g == f { kron(&term, local) } else { kron(&term, &Matrix::identity(*d)) };
        }
        out = out.add(&term);
    }
    out
}

/// Induced multiplicities for a fixed `(k_x, chi)`, reusing factor actions across `K`-types.
pub struct InducedContext {
    member: Member,
    group: KGroup,
    k_x: Vec<Matrix>,
    weight: Vec<Scalar>,
    actions: HashMap<(usize, Vec<i32>), Vec<Matrix>>,
}

impl InducedContext {
    pub fn new(member: Member, k_x: &[Matrix], weight: &[Scalar]) -> Result<Self, KspecError> {
        Ok(InducedContext { member, group: k_group(member)?, k_x: k_x.to_vec(), weight: weight.to_vec(), actions: HashMap::new() })
    }

    fn factor_actions(&mut self, f: usize, hw: &[i32]) -> Result<&Vec<Matrix>, KspecError> {
        let key = (f, hw.to_vec());
        if !self.actions.contains_key(&key) {
            let module = cached_module(self.group.factors[f], hw)?;
            let fac = self.member.factors()[f];
            let acts = self.k_x.iter().map(|z| module.action(&model::factor_part(&fac, z))).collect();
            self.actions.insert(key.clone(), acts);
        }
        Ok(&self.actions[&key])
    }

    /// `dim Hom_{k_x}(sigma, chi)`.
    pub fn multiplicity(&mut self, sigma: &Irrep) -> Result<i64, KspecError> {
        let g = self.group.clone();
        if sigma.weight.len() != g.rank() {
            return Err(KspecError::Label(format!("weight {:?} has the wrong length for {:?}", sigma.weight, g.factors)));
        }
        let mut per_factor: Vec<Vec<Matrix>> = Vec::new();
        for f in 0..g.factors.len() {
            per_factor.push(self.factor_actions(f, &sigma.part(&g, f))?.clone());
        }
        let dim: usize = (0..g.factors.len()).map(|f| dimension(g.root_type(f), &sigma.part(&g, f)) as usize).product();
        if self.k_x.is_empty() {
            return Ok(dim as i64);
        }
        // Intersect left kernels of rho(Z_i) - chi_i one generator at a time.
        let mut phi = Matrix::identity(dim);
        for (i, c) in self.weight.iter().enumerate() {
            let locals: Vec<Matrix> = per_factor.iter().map(|a| a[i].clone()).collect();
            let m = kron_sum(&locals).sub(&Matrix::identity(dim).scale(c));
            let restricted = phi.mul(&m);
            let ker = kernel(&restricted.transpose());
            if ker.is_empty() {
                return Ok(0);
            }
            let comb = Matrix::from_rows(ker);
            phi = comb.mul(&phi);
        }
        Ok(phi.rows() as i64)
    }
}

/// `dim Hom_{k_x}(sigma, chi)`: the multiplicity of `sigma` in `Ind_{K_x}^K chi`
/// seen through the identity components. `k_x` are `V`-operators and `weight`
/// gives `chi` on them.
pub fn induced_multiplicity_at(member: Member, k_x: &[Matrix], weight: &[Scalar], sigma: &Irrep) -> Result<i64, KspecError> {
    InducedContext::new(member, k_x, weight)?.multiplicity(sigma)
}

/// [`induced_multiplicity_at`] for an orbit datum.
pub fn induced_multiplicity(d: &OrbitDatum, sigma: &Irrep) -> Result<i64, KspecError> {
    induced_multiplicity_at(d.rep.member(), &d.k_x(), &d.character.base_weight, sigma)
}

#[derive(Clone, Debug, Serialize)]
pub struct TfRow {
    pub sigma_prime: Irrep,
    /// Sum over harmonic partners `sigma` of the multiplicity of `sigma*` on side `G`.
    pub transferred: i64,
    /// Multiplicity of `sigma'` in the induced module on side `G'`.
    pub induced: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TfReport {
    pub pair: String,
    pub orbit: String,
    pub rows: Vec<TfRow>,
    pub passed: bool,
}

/// Compares the transfer of `Ind_{K_x}^K triv` with `Ind_{K'_{x'}}^{K'} triv`
/// on every `sigma'` occurring in the harmonics up to `W`-degree `max_w_deg`.
pub fn tf_check(o: &Orbit, max_w_deg: usize) -> Result<TfReport, KspecError> {
    if o.side != Side::G {
        return Err(KspecError::Label("the orbit must be on side G".into()));
    }
    let pair = o.pair;
    let sm = construct_w(o)?;
    let h = harmonics(&pair, max_w_deg)?;
    let g = pair.side_member(Side::G);
    let gp = pair.side_member(Side::GPrime);
    let zero_g = vec![Scalar::zero(); sm.k_x.len()];
    let zero_gp = vec![Scalar::zero(); sm.kprime_xprime.len()];
    let mut partners: BTreeMap<Irrep, Vec<(Irrep, i64)>> = BTreeMap::new();
    for (hd, terms) in h.degrees.iter().enumerate() {
        if hd % 2 == 1 {
            continue;
        }
        for ((s, sp), m) in terms {
            partners.entry(sp.clone()).or_default().push((s.clone(), *m));
        }
    }
    let mut rows = Vec::new();
    let mut ctx_g = InducedContext::new(g, &sm.k_x, &zero_g)?;
    let mut ctx_gp = InducedContext::new(gp, &sm.kprime_xprime, &zero_gp)?;
    for (sp, list) in partners {
        let mut transferred = 0;
        for (s, m) in list {
            transferred += m * ctx_g.multiplicity(&s.dual(&h.k))?;
        }
        let induced = ctx_gp.multiplicity(&sp)?;
        rows.push(TfRow { sigma_prime: sp, transferred, induced });
    }
    let passed = rows.iter().all(|r| r.transferred == r.induced);
    Ok(TfReport { pair: pair.to_string(), orbit: o.diagram.to_string(), rows, passed })
}
