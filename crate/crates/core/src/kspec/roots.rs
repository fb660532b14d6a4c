//! Root data of the factor groups and exact irreducible characters
//! (Freudenthal's formula on dominant weights, then Weyl orbits).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::pairs::FactorKind;

use super::KspecError;

/// Torus weight multiplicities, keyed by weight in `ε`-coordinates.
pub type Laurent = BTreeMap<Vec<i32>, i64>;

/// Root system shape used for one factor of a product group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RootType {
    /// `gl_a`, weights non-increasing integers.
    A(usize),
    /// `sp_2a`.
    C(usize),
    /// `so_{2m+1}`.
    B(usize),
    /// `O_{2m}`, `m >= 2`, through `so_{2m}`: highest weights have `lambda_m >= 0`, and
    /// `lambda_m > 0` stands for the sum of the two conjugate `so_{2m}` irreducibles.
    D(usize),
    /// `O_2` seen through its torus: irreducibles `σ_k` with weights `±k`, or a line for `k = 0`.
    O2,
    /// Finite or trivial torus (`O_1`, or an `O_2` factor whose reflection is being traced).
    Rank0,
}

impl RootType {
    pub fn of(kind: FactorKind) -> Result<RootType, KspecError> {
        Ok(match kind {
            FactorKind::GL(a) => RootType::A(a),
            FactorKind::Sp(a) => RootType::C(a),
            FactorKind::O(1) | FactorKind::O(0) => RootType::Rank0,
            FactorKind::O(2) => RootType::O2,
            FactorKind::O(a) if a % 2 == 1 => RootType::B(a / 2),
            FactorKind::O(a) => RootType::D(a / 2),
        })
    }

    pub fn rank(self) -> usize {
        match self {
            RootType::A(a) | RootType::C(a) | RootType::B(a) | RootType::D(a) => a,
            RootType::O2 => 1,
            RootType::Rank0 => 0,
        }
    }

    pub fn is_dominant(self, l: &[i32]) -> bool {
        let desc = l.windows(2).all(|w| w[0] >= w[1]);
        match self {
            RootType::A(_) => desc,
            RootType::C(_) | RootType::B(_) | RootType::D(_) => desc && l.last().is_none_or(|&x| x >= 0),
            RootType::O2 => l[0] >= 0,
            RootType::Rank0 => true,
        }
    }

    /// Positive roots, doubled so that `B` has integral `ρ`.
    fn positive_roots2(self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let e = |i: usize, c: i64| {
            let mut v = vec![0; n];
            v[i] = c;
            v
        };
        let mut out = Vec::new();
        if let RootType::A(_) | RootType::B(_) | RootType::C(_) | RootType::D(_) = self {
            for i in 0..n {
                for j in i + 1..n {
                    let mut v = e(i, 2);
                    v[j] = -2;
                    out.push(v);
                    if !matches!(self, RootType::A(_)) {
                        let mut v = e(i, 2);
                        v[j] = 2;
                        out.push(v);
                    }
                }
            }
        }
        match self {
            RootType::C(_) => (0..n).for_each(|i| out.push(e(i, 4))),
            RootType::B(_) => (0..n).for_each(|i| out.push(e(i, 2))),
            _ => {}
        }
        out
    }

    fn rho2(self) -> Vec<i64> {
        let n = self.rank() as i64;
        match self {
            RootType::A(_) => (0..n).map(|i| 2 * (n - 1 - i)).collect(),
            RootType::C(_) => (0..n).map(|i| 2 * (n - i)).collect(),
            RootType::B(_) => (0..n).map(|i| 2 * (n - i) - 1).collect(),
            RootType::D(_) => (0..n).map(|i| 2 * (n - 1 - i)).collect(),
            _ => vec![0; n as usize],
        }
    }

    /// Weyl-dominance for the connected group (`so_{2m}` allows `lambda_m < 0`).
    fn weyl_dominant(self, l: &[i32]) -> bool {
        match self {
            RootType::D(m) => {
                let head = &l[..m - 1];
                head.windows(2).all(|w| w[0] >= w[1]) && head.last().is_none_or(|&x| x >= l[m - 1].abs())
            }
            _ => self.is_dominant(l),
        }
    }

    /// Dominant representative of the Weyl orbit.
    fn dominant(self, v: &[i32]) -> Vec<i32> {
        if let RootType::D(_) = self {
            let negatives = v.iter().filter(|&&x| x < 0).count();
            let mut out: Vec<i32> = v.iter().map(|x| x.abs()).collect();
            out.sort_unstable_by(|a, b| b.cmp(a));
            if negatives % 2 == 1 && v.iter().all(|&x| x != 0) {
                let last = out.len() - 1;
                out[last] = -out[last];
            }
            return out;
        }
        let mut out: Vec<i32> = match self {
            RootType::A(_) => v.to_vec(),
            RootType::O2 => return vec![v[0].abs()],
            RootType::Rank0 => return Vec::new(),
            _ => v.iter().map(|x| x.abs()).collect(),
        };
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Distinct elements of the Weyl orbit of a dominant weight.
    fn orbit(self, v: &[i32]) -> Vec<Vec<i32>> {
        match self {
            RootType::Rank0 => vec![Vec::new()],
            RootType::O2 => {
                if v[0] == 0 {
                    vec![vec![0]]
                } else {
                    vec![vec![v[0]], vec![-v[0]]]
                }
            }
            _ => {
                let signed = !matches!(self, RootType::A(_));
                let even_flips = matches!(self, RootType::D(_));
                let mut seen = BTreeSet::new();
                // For D with a negative entry, flip one sign back: odd flips of |v| give the orbit.
                let odd_start = even_flips && v.iter().any(|&x| x < 0);
                let mut perm: Vec<i32> = if even_flips { v.iter().map(|x| x.abs()).collect() } else { v.to_vec() };
                perm.sort_unstable();
                loop {
                    if signed {
                        let nz: Vec<usize> = (0..perm.len()).filter(|&i| perm[i] != 0).collect();
                        for mask in 0u32..(1 << nz.len()) {
                            if even_flips && nz.len() == perm.len() && (mask.count_ones() % 2 == 1) != odd_start {
                                continue;
                            }
                            let mut w = perm.clone();
                            for (b, &i) in nz.iter().enumerate() {
                                if mask >> b & 1 == 1 {
                                    w[i] = -w[i];
                                }
                            }
                            seen.insert(w);
                        }
                    } else {
                        seen.insert(perm.clone());
                    }
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
                seen.into_iter().collect()
            }
        }
    }
}

fn next_permutation(v: &mut [i32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Multiplicities of the dominant weights of `V_λ`.
fn dominant_multiplicities(t: RootType, lambda: &[i32]) -> Vec<(Vec<i32>, i64)> {
    let roots2 = t.positive_roots2();
    let rho2 = t.rho2();
    // Dominant weights below lambda: closure under subtracting positive roots while staying dominant.
    let mut found: BTreeSet<Vec<i32>> = BTreeSet::new();
    let mut stack = vec![lambda.to_vec()];
    found.insert(lambda.to_vec());
    while let Some(mu) = stack.pop() {
        for a in &roots2 {
            let nu: Vec<i32> = mu.iter().zip(a).map(|(m, x)| m - (*x / 2) as i32).collect();
            if t.weyl_dominant(&nu) && found.insert(nu.clone()) {
                stack.push(nu);
            }
        }
    }
    let height: Vec<i64> = (0..t.rank()).map(|i| (t.rank() - i) as i64).collect();
    let mut order: Vec<Vec<i32>> = found.into_iter().collect();
    let h = |v: &Vec<i32>| -> i64 { v.iter().zip(&height).map(|(x, c)| *x as i64 * c).sum() };
    order.sort_by_key(|v| std::cmp::Reverse(h(v)));
    let lr: Vec<i64> = lambda.iter().zip(&rho2).map(|(l, r)| 2 * *l as i64 + r).collect();
    let norm_top = dot(&lr, &lr);
    let mut mult: HashMap<Vec<i32>, i64> = HashMap::new();
    for mu in &order {
        if mu.as_slice() == lambda {
            mult.insert(mu.clone(), 1);
            continue;
        }
        let mu2: Vec<i64> = mu.iter().map(|&x| 2 * x as i64).collect();
        let mr: Vec<i64> = mu2.iter().zip(&rho2).map(|(m, r)| m + r).collect();
        let denom = norm_top - dot(&mr, &mr);
        let mut num = 0i64;
        for a in &roots2 {
            let mut k = 1i64;
            loop {
                let shifted: Vec<i32> = mu.iter().zip(a).map(|(m, x)| m + (k * x / 2) as i32).collect();
                let Some(&m) = mult.get(&t.dominant(&shifted)) else { break };
                let s2: Vec<i64> = shifted.iter().map(|&x| 2 * x as i64).collect();
                num += m * dot(&s2, a);
                k += 1;
            }
        }
        // Inner products carry a factor 4 from doubling; 2 * num / 4 over denom / 4.
        let value = 2 * num / denom;
        debug_assert_eq!(2 * num % denom, 0, "Freudenthal quotient is integral");
        mult.insert(mu.clone(), value);
    }
    order.into_iter().map(|mu| {
        let m = mult[&mu];
        (mu, m)
    }).collect()
}

fn cache() -> &'static Mutex<HashMap<(RootType, Vec<i32>), Laurent>> {
    static CACHE: OnceLock<Mutex<HashMap<(RootType, Vec<i32>), Laurent>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Character of the irreducible with dominant weight `lambda` (for `O2`, the
/// module `σ_k` or a line when `k = 0`).
pub fn irreducible_character(t: RootType, lambda: &[i32]) -> Laurent {
    assert!(t.is_dominant(lambda) && lambda.len() == t.rank(), "dominant weight expected");
    if let RootType::D(m) = t {
        if lambda[m - 1] > 0 {
            let mut conj = lambda.to_vec();
            conj[m - 1] = -conj[m - 1];
            let mut out = weyl_character(t, lambda);
            for (w, c) in weyl_character(t, &conj) {
                *out.entry(w).or_insert(0) += c;
            }
            return out;
        }
    }
    weyl_character(t, lambda)
}

/// Character of the connected group's irreducible (for `D`, one `so_{2m}` constituent).
fn weyl_character(t: RootType, lambda: &[i32]) -> Laurent {
    if let Some(c) = cache().lock().expect("cache lock").get(&(t, lambda.to_vec())) {
        return c.clone();
    }
    let mut out = Laurent::new();
    match t {
        RootType::Rank0 | RootType::O2 => {
            for w in t.orbit(lambda) {
                out.insert(w, 1);
            }
        }
        _ => {
            for (mu, m) in dominant_multiplicities(t, lambda) {
                if m != 0 {
                    for w in t.orbit(&mu) {
                        out.insert(w, m);
                    }
                }
            }
        }
    }
    cache().lock().expect("cache lock").insert((t, lambda.to_vec()), out.clone());
    out
}

pub fn dimension(t: RootType, lambda: &[i32]) -> i64 {
    irreducible_character(t, lambda).values().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: i64, k: i64) -> i64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Weyl dimension formula, an independent check of the characters.
    fn weyl_dimension(t: RootType, lambda: &[i32]) -> i64 {
        let roots2 = t.positive_roots2();
        let rho2 = t.rho2();
        let lr: Vec<i64> = lambda.iter().zip(&rho2).map(|(l, r)| 2 * *l as i64 + r).collect();
        let (mut num, mut den) = (1i128, 1i128);
        for a in &roots2 {
            num *= dot(&lr, a) as i128;
            den *= dot(&rho2, a) as i128;
        }
        (num / den) as i64
    }

    #[test]
    fn dimensions_match_weyl() {
        let cases: Vec<(RootType, Vec<i32>)> = vec![
            (RootType::A(2), vec![3, 0]),
            (RootType::A(3), vec![2, 1, 0]),
            (RootType::A(3), vec![1, 0, -2]),
            (RootType::C(2), vec![1, 1]),
            (RootType::C(2), vec![2, 1]),
            (RootType::C(3), vec![1, 1, 0]),
            (RootType::B(1), vec![3]),
            (RootType::B(2), vec![1, 1]),
            (RootType::B(2), vec![2, 0]),
            (RootType::D(2), vec![2, 0]),
            (RootType::D(3), vec![1, 1, 0]),
        ];
        for (t, l) in cases {
            assert_eq!(dimension(t, &l), weyl_dimension(t, &l), "{t:?} {l:?}");
        }
    }

    #[test]
    fn gl_symmetric_powers() {
        for k in 0..6 {
            assert_eq!(dimension(RootType::A(3), &[k, 0, 0]), binom(k as i64 + 2, 2));
        }
        let c = irreducible_character(RootType::A(2), &[2, 0]);
        assert_eq!(c.get(&vec![1, 1]), Some(&1));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn small_known_characters() {
        // sp_4 adjoint: weight 0 with multiplicity 2.
        let c = irreducible_character(RootType::C(2), &[2, 0]);
        assert_eq!(c.get(&vec![0, 0]), Some(&2));
        assert_eq!(dimension(RootType::C(2), &[2, 0]), 10);
        // so_5 vector representation.
        assert_eq!(dimension(RootType::B(2), &[1, 0]), 5);
        assert_eq!(irreducible_character(RootType::O2, &[3]).len(), 2);
        // O(4): vector, Lambda^2 (both halves), and Lambda^3 of O(6).
        assert_eq!(dimension(RootType::D(2), &[1, 0]), 4);
        assert_eq!(dimension(RootType::D(2), &[1, 1]), 6);
        assert_eq!(dimension(RootType::D(3), &[1, 1, 1]), 20);
        assert_eq!(irreducible_character(RootType::D(2), &[1, 1]).get(&vec![1, -1]), Some(&1));
    }
}
