//! Exact integer linear algebra: Bareiss determinants, integer kernels and
//! Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Row = Vec<BigInt>;

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn bareiss_det(m: &[Row]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Row> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank over the rationals.
pub fn rank(rows: &[Row]) -> usize {
    let mut m: Vec<Row> = rows.to_vec();
    echelon(&mut m, None);
    m.iter().filter(|r| r.iter().any(|x| !x.is_zero())).count()
}

/// Integer row reduction to echelon form; `track` receives the same row
/// operations. Returns the pivot columns.
fn echelon(m: &mut [Row], mut track: Option<&mut Vec<Row>>) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr >= m.len() {
            break;
        }
        loop {
            // smallest nonzero entry in this column at or below the pivot row
            let best = (pr..m.len()).filter(|&i| !m[i][c].is_zero()).min_by_key(|&i| m[i][c].abs());
            let Some(b) = best else { break };
            m.swap(pr, b);
            if let Some(t) = track.as_deref_mut() {
                t.swap(pr, b);
            }
            let mut done = true;
            for i in pr + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[pr][c]);
                let (src, dst) = two(m, pr, i);
                axpy(dst, src, &q);
                if let Some(t) = track.as_deref_mut() {
                    let (src, dst) = two(t, pr, i);
                    axpy(dst, src, &q);
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !m[pr][c].is_zero() {
            pivots.push(c);
            pr += 1;
        }
    }
    pivots
}

fn two(m: &mut [Row], a: usize, b: usize) -> (&Row, &mut Row) {
    assert_ne!(a, b);
    if a < b {
        let (x, y) = m.split_at_mut(b);
        (&x[a], &mut y[0])
    } else {
        let (x, y) = m.split_at_mut(a);
        (&y[0], &mut x[b])
    }
}

/// `dst -= q * src`
fn axpy(dst: &mut Row, src: &Row, q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

/// A basis of the lattice `{y in Z^cols : m y = 0}`.
pub fn kernel(m: &[Row], cols: usize) -> Vec<Row> {
    // row-reduce the transpose while tracking the unimodular transform
    let mut t: Vec<Row> = (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect();
    let mut u: Vec<Row> = (0..cols)
        .map(|j| (0..cols).map(|k| if j == k { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    if m.is_empty() {
        return u;
    }
    let piv = echelon(&mut t, Some(&mut u));
    u.split_off(piv.len())
}

/// Row Hermite normal form: positive pivots, entries above each pivot reduced
/// into `[0, pivot)`, zero rows dropped.
pub fn hnf(rows: &[Row]) -> Vec<Row> {
    let mut m: Vec<Row> = rows.to_vec();
    let piv = echelon(&mut m, None);
    m.truncate(piv.len());
    for (i, &c) in piv.iter().enumerate() {
        if m[i][c].is_negative() {
            for x in m[i].iter_mut() {
                *x = -x.clone();
            }
        }
        for k in 0..i {
            let q = m[k][c].div_floor(&m[i][c]);
            if !q.is_zero() {
                let (src, dst) = two(&mut m, i, k);
                axpy(dst, src, &q);
            }
        }
    }
    m
}

/// Basis of `span(rows) ∩ Z^cols`, in Hermite normal form.
pub fn saturate(rows: &[Row], cols: usize) -> Vec<Row> {
    let k = kernel(rows, cols);
    hnf(&kernel(&k, cols))
}

/// Gram matrix `B B^T`.
pub fn gram(rows: &[Row]) -> Vec<Row> {
    rows.iter()
        .map(|a| rows.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

/// Adjugate of a square integer matrix (transpose of the cofactor matrix).
pub fn adjugate(m: &[Row]) -> Vec<Row> {
    let n = m.len();
    if n == 1 {
        return vec![vec![BigInt::one()]];
    }
    let minor = |skip_r: usize, skip_c: usize| -> Vec<Row> {
        (0..n)
            .filter(|&i| i != skip_r)
            .map(|i| (0..n).filter(|&j| j != skip_c).map(|j| m[i][j].clone()).collect())
            .collect()
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = bareiss_det(&minor(j, i));
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect()
        })
        .collect()
}
