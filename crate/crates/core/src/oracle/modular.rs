//! Arithmetic modulo a 62-bit prime: elimination and rational reconstruction.

use num_bigint::BigInt;
use rand::Rng;

use crate::algebra::Rational;

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(p)) as u64
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo a prime.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly chosen prime in `[2^61, 2^62)`.
pub fn random_prime<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.random_range(1u64 << 61..1u64 << 62) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

#[cfg(test)]
pub fn reduce_int(x: &BigInt, p: u64) -> u64 {
    let r = x % BigInt::from(p);
    let r = if r < BigInt::from(0) {
        r + BigInt::from(p)
    } else {
        r
    };
    u64::try_from(r).expect("residue fits")
}

/// Largest `n` with `2 n^2 < p`: numerator and denominator bound for unique reconstruction.
pub fn lift_bound(p: u64) -> u64 {
    let mut n = ((p / 2) as f64).sqrt() as u64;
    while 2 * u128::from(n) * u128::from(n) >= u128::from(p) {
        n -= 1;
    }
    while 2 * u128::from(n + 1) * u128::from(n + 1) < u128::from(p) {
        n += 1;
    }
    n
}

/// The unique `r/s` with `|r|, s <= bound` and `r ≡ a s (mod p)`, if any.
pub fn rational_reconstruct(a: u64, p: u64, bound: u64) -> Option<Rational> {
    let (mut r0, mut r1) = (i128::from(p), i128::from(a));
    let (mut t0, mut t1) = (0i128, 1i128);
    let bound = i128::from(bound);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    if num_integer::gcd(num, den) != 1 {
        return None;
    }
    Some(Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// Kernel basis of a row-major matrix: one vector per free column, with a one there.
pub fn kernel(mut a: Vec<Vec<u64>>, cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = inv_mod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = sub_mod(*x, mul_mod(f, y, p), p);
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivots {
            v[c] = true;
        }
        v
    };
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = sub_mod(0, a[row][f], p);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(97) && is_prime((1u64 << 61) - 1));
        assert!(!is_prime(1) && !is_prime(561) && !is_prime(3_215_031_751));
        let p = random_prime(&mut stream(3, 0));
        assert!(is_prime(p) && (1 << 61..1 << 62).contains(&p));
    }

    #[test]
    fn reconstructs_small_fractions() {
        let p = (1u64 << 61) - 1;
        let n = lift_bound(p);
        for (num, den) in [(3i64, 7u64), (-2, 1), (0, 1), (123_456, 789)] {
            let a = mul_mod(reduce_int(&BigInt::from(num), p), inv_mod(den, p), p);
            let q = rational_reconstruct(a, p, n).unwrap();
            assert_eq!(q, Rational::new(num.into(), den.into()));
        }
    }

    #[test]
    fn kernel_of_rank_one_matrix() {
        let p = 1_000_000_007;
        let k = kernel(vec![vec![1, 2, 3], vec![2, 4, 6]], 3, p);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot = (0..3).fold(0, |acc, i| add_mod(acc, mul_mod([1, 2, 3][i], v[i], p), p));
            assert_eq!(dot, 0);
        }
    }
}
