//! Exact solvers for small dense integer systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// The Mersenne prime `2^61 - 1`.
pub const PRIME: u64 = (1 << 61) - 1;

fn reduce(x: u128) -> u64 {
    let lo = (x as u64 & PRIME) as u128;
    let hi = x >> 61;
    let mut r = lo + (hi & PRIME as u128) + (hi >> 61);
    while r >= PRIME as u128 {
        r -= PRIME as u128;
    }
    r as u64
}

fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + PRIME - b
    }
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn inverse(a: u64) -> u64 {
    pow(a, PRIME - 2)
}

fn from_i64(x: i64) -> u64 {
    let r = (x as i128).rem_euclid(PRIME as i128);
    r as u64
}

fn from_bigint(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(PRIME)).to_u64().unwrap()
}

/// Solve the square system `a x = b` modulo [`PRIME`]. `None` if `a` is
/// singular modulo the prime.
pub fn solve_mod_p(a: &[Vec<i64>], b: &[BigInt]) -> Option<Vec<u64>> {
    let k = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r: Vec<u64> = row.iter().map(|&x| from_i64(x)).collect();
            r.push(from_bigint(rhs));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        let inv = inverse(m[col][col]);
        for x in m[col][col..].iter_mut() {
            *x = mul(*x, inv);
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col] == 0 {
                continue;
            }
            let f = row[col];
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = sub(*x, mul(f, p));
            }
        }
    }
    Some(m.iter().map(|r| r[k]).collect())
}

/// The rational `p/q` with `|p|, q <= sqrt(PRIME / 2)` congruent to `x`,
/// if one exists.
pub fn reconstruct(x: u64) -> Option<BigRational> {
    let bound = ((PRIME / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (PRIME as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (p, q) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    if mul(from_i64(q as i64), x) != from_i64(p as i64) {
        return None;
    }
    Some(BigRational::new(BigInt::from(p), BigInt::from(q)))
}

/// Fraction-free Gaussian elimination on the square system `a x = b`,
/// pivoting on columns in `order`. `None` if `a` is singular.
pub fn bareiss_solve(a: &[Vec<i64>], b: &[BigInt], order: &[usize]) -> Option<Vec<BigRational>> {
    let k = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r: Vec<BigInt> = order.iter().map(|&c| BigInt::from(row[c])).collect();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for col in 0..k {
        let piv = (col..k).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        for r in col + 1..k {
            for c in col + 1..=k {
                let v = (&m[col][col] * &m[r][c] - &m[r][col] * &m[col][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }
    let mut x = vec![BigRational::zero(); k];
    for col in (0..k).rev() {
        let mut acc = BigRational::from_integer(m[col][k].clone());
        for c in col + 1..k {
            acc -= BigRational::from_integer(m[col][c].clone()) * &x[c];
        }
        x[col] = acc / BigRational::from_integer(m[col][col].clone());
    }
    let mut out = vec![BigRational::zero(); k];
    for (i, &c) in order.iter().enumerate() {
        out[c] = x[i].clone();
    }
    Some(out)
}

/// `a x` in exact arithmetic.
pub fn apply(a: &[Vec<i64>], x: &[BigRational]) -> Vec<BigRational> {
    a.iter()
        .map(|row| row.iter().zip(x).filter(|(&c, _)| c != 0).fold(BigRational::zero(), |acc, (&c, v)| acc + v * BigInt::from(c)))
        .collect()
}
