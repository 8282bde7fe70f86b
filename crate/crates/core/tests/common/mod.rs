//! Naive nested-loop oracles, independent of the library's kernels.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use squeezelab::families::{generate, FamilyKind, FamilySpec, SeededRng};
use squeezelab::{NumSet, Scalar};

pub type Q = BigRational;

pub trait Elem: Ord + Clone + std::fmt::Debug {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn from_scalar(s: &Scalar) -> Self;
}

impl Elem for Q {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn from_scalar(s: &Scalar) -> Self {
        BigRational::new(s.numer().clone(), s.denom().clone())
    }
}

impl Elem for i128 {
    fn add(&self, o: &Self) -> Self {
        self.checked_add(*o).expect("oracle overflow")
    }
    fn sub(&self, o: &Self) -> Self {
        self.checked_sub(*o).expect("oracle overflow")
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(*o).expect("oracle overflow")
    }
    fn from_scalar(s: &Scalar) -> Self {
        assert!(s.is_integer(), "{s} is not an integer");
        i128::try_from(s.numer().clone()).expect("fits i128")
    }
}

pub fn elems<T: Elem>(a: &NumSet) -> Vec<T> {
    a.iter().map(|s| T::from_scalar(&s)).collect()
}

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sorted and deduplicated.
pub fn finish<T: Elem>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

pub fn combine<T: Elem>(a: &[T], b: &[T], op: impl Fn(&T, &T) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(op(x, y));
        }
    }
    finish(out)
}

pub fn sum<T: Elem>(a: &[T], b: &[T]) -> Vec<T> {
    combine(a, b, T::add)
}

pub fn diff<T: Elem>(a: &[T], b: &[T]) -> Vec<T> {
    combine(a, b, T::sub)
}

pub fn prod<T: Elem>(a: &[T], b: &[T]) -> Vec<T> {
    combine(a, b, T::mul)
}

pub fn dilate<T: Elem>(a: &[T], c: &T) -> Vec<T> {
    finish(a.iter().map(|x| c.mul(x)).collect())
}

pub fn sqdiff<T: Elem>(a: &[T]) -> Vec<T> {
    combine(a, a, |x, y| {
        let d = x.sub(y);
        d.mul(&d)
    })
}

/// `kA` by enumerating every k-tuple of `A`.
pub fn ksum_tuples<T: Elem>(a: &[T], k: usize) -> Vec<T> {
    assert!(k >= 1 && !a.is_empty());
    let mut idx = vec![0usize; k];
    let mut out = Vec::new();
    'outer: loop {
        let mut s = a[idx[0]].clone();
        for &i in &idx[1..] {
            s = s.add(&a[i]);
        }
        out.push(s);
        for pos in (0..k).rev() {
            idx[pos] += 1;
            if idx[pos] < a.len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    finish(out)
}

/// `kA` by repeated pairwise sums.
pub fn ksum<T: Elem>(a: &[T], k: usize) -> Vec<T> {
    assert!(k >= 1);
    let mut acc = a.to_vec();
    for _ in 1..k {
        acc = sum(&acc, a);
    }
    acc
}

pub fn kdiff<T: Elem>(a: &[T], k: usize) -> Vec<T> {
    let s = ksum(a, k);
    diff(&s, &s)
}

/// `plus*A - minus*A`, `minus` may be zero.
pub fn signed<T: Elem>(a: &[T], plus: usize, minus: usize) -> Vec<T> {
    let p = ksum(a, plus);
    if minus == 0 {
        return p;
    }
    diff(&p, &ksum(a, minus))
}

/// Squared Euclidean distances between all pairs of points of `A^d`.
pub fn squared_distances_direct<T: Elem>(a: &[T], d: usize) -> Vec<T> {
    let n = a.len();
    let points = n.pow(d as u32);
    let coords = |mut p: usize| -> Vec<&T> {
        let mut c = Vec::with_capacity(d);
        for _ in 0..d {
            c.push(&a[p % n]);
            p /= n;
        }
        c
    };
    let all: Vec<Vec<&T>> = (0..points).map(coords).collect();
    let mut out = Vec::with_capacity(points * points);
    for p in &all {
        for r in &all {
            let mut s: Option<T> = None;
            for (x, y) in p.iter().zip(r) {
                let t = x.sub(y);
                let t = t.mul(&t);
                s = Some(match s {
                    Some(acc) => acc.add(&t),
                    None => t,
                });
            }
            out.push(s.expect("d >= 1"));
        }
    }
    finish(out)
}

/// Consecutive pair with the smallest difference, lowest index on ties.
pub fn min_gap_pair<T: Elem>(a: &[T]) -> (T, T) {
    let mut best = 0;
    for i in 1..a.len() - 1 {
        if a[i + 1].sub(&a[i]) < a[best + 1].sub(&a[best]) {
            best = i;
        }
    }
    (a[best].clone(), a[best + 1].clone())
}

pub fn family(kind: &str, n: usize, seed: u64) -> NumSet {
    let kind: FamilyKind = kind.parse().expect("family spelling");
    generate(&FamilySpec::new(kind, n, seed)).expect("feasible family")
}

/// Test-local generator for sizes and parameters.
pub fn rng(seed: u64) -> SeededRng {
    SeededRng::new(seed ^ 0x005e_ed0f_7e57)
}

/// Lowest common denominator of the elements.
pub fn lcm_den(x: &[Q]) -> BigInt {
    use num_integer::Integer;
    x.iter().fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()))
}

/// `L * x` as integers, where `L` is a common denominator of `x`.
pub fn scaled(x: &[Q], l: &BigInt) -> Vec<i128> {
    x.iter()
        .map(|v| {
            let s = v * BigRational::from_integer(l.clone());
            assert!(s.is_integer());
            i128::try_from(s.to_integer()).expect("fits i128")
        })
        .collect()
}

/// `L * A` as integers straight from the library's set, `L` a common denominator.
pub fn scaled_set(a: &NumSet, l: &BigInt) -> Vec<i128> {
    a.iter()
        .map(|s| {
            let (m, r) = num_integer::Integer::div_rem(l, s.denom());
            assert!(
                r == BigInt::from(0),
                "{l} is not a multiple of {}",
                s.denom()
            );
            i128::try_from(s.numer() * m).expect("fits i128")
        })
        .collect()
}
