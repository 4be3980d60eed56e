//! Exact integer matrix kernels: rank, determinant, rational solves,
//! integer kernels and Smith normal form. Matrices are row-major
//! `Vec<Vec<BigInt>>`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect()
}

pub fn transpose(m: &[Vec<BigInt>]) -> IntMatrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

fn to_rational(m: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    m.iter()
        .map(|row| row.iter().cloned().map(BigRational::from_integer).collect())
        .collect()
}

/// Reduced row echelon form in place over `Q`; returns pivot columns.
fn rref(m: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..m[r].len() {
                    let delta = &factor * &m[row][c];
                    m[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<BigInt>]) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut q = to_rational(m);
    rref(&mut q, cols).len()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
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

/// Rational coefficients `x` with `Σ x_i rows[i] = target`, if any. Rows
/// must be linearly independent, so the solution is unique when it exists.
pub fn solve_rational(rows: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = rows.len();
    let n = target.len();
    // Columns are the generators; solve A x = target with A = rows^T.
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> = rows
                .iter()
                .map(|g| BigRational::from_integer(g[i].clone()))
                .collect();
            r.push(BigRational::from_integer(target[i].clone()));
            r
        })
        .collect();
    let pivots = rref(&mut aug, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    debug_assert_eq!(pivots.len(), k, "generators must be independent");
    let mut x = vec![BigRational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][k].clone();
    }
    Some(x)
}

/// Integer coefficients expressing `target` in the lattice spanned by the
/// independent `rows`, or `None` if `target` is not in that lattice.
pub fn solve_integral(rows: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    let x = solve_rational(rows, target)?;
    x.into_iter()
        .map(|q| q.is_integer().then(|| q.to_integer()))
        .collect()
}

/// A basis of `{x ∈ Z^n : f · x = 0 for every f in functionals}`.
///
/// Runs unimodular row reduction on `[F^T | I]`; rows whose left block
/// vanishes carry the kernel in their right block.
pub fn integer_kernel(functionals: &[Vec<BigInt>], n: usize) -> IntMatrix {
    let m = functionals.len();
    let ft = if m == 0 {
        vec![Vec::new(); n]
    } else {
        transpose(functionals)
    };
    let id = identity(n);
    let mut work: IntMatrix = ft
        .into_iter()
        .zip(id)
        .map(|(mut l, r)| {
            l.extend(r);
            l
        })
        .collect();

    let mut top = 0;
    for col in 0..m {
        if top == n {
            break;
        }
        // Euclid on the column below `top` until only one nonzero entry remains.
        loop {
            let nonzero: Vec<usize> = (top..n).filter(|&r| !work[r][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let p = *nonzero
                .iter()
                .min_by_key(|&&r| work[r][col].abs())
                .expect("nonempty");
            work.swap(top, p);
            let mut done = true;
            for r in top + 1..n {
                if work[r][col].is_zero() {
                    continue;
                }
                let q = work[r][col].div_floor(&work[top][col]);
                for c in 0..m + n {
                    let delta = &q * &work[top][c];
                    work[r][c] -= delta;
                }
                if !work[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                top += 1;
                break;
            }
        }
    }
    work.into_iter()
        .skip(top)
        .map(|row| row[m..].to_vec())
        .collect()
}

/// Nonzero invariant factors `d_1 | d_2 | ...` of an integer matrix.
pub fn smith_invariant_factors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        let mut clean = true;
        for i in t + 1..rows {
            if a[i][t].is_zero() {
                continue;
            }
            let q = a[i][t].div_floor(&a[t][t]);
            for j in t..cols {
                let delta = &q * &a[t][j];
                a[i][j] -= delta;
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..cols {
            if a[t][j].is_zero() {
                continue;
            }
            let q = a[t][j].div_floor(&a[t][t]);
            for i in t..rows {
                let delta = &q * &a[i][t];
                a[i][j] -= delta;
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // Divisibility: fold any offending row into the pivot row and retry.
        let offending = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
        if let Some((i, _)) = offending {
            for j in t..cols {
                let v = a[i][j].clone();
                a[t][j] += v;
            }
            continue;
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&mat(&[&[2, 1], &[1, 2]])), BigInt::from(3));
        assert_eq!(determinant(&mat(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(
            determinant(&mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]])),
            BigInt::zero()
        );
        assert_eq!(
            determinant(&mat(&[&[0, 2, 1], &[3, 0, 0], &[1, 1, 5]])),
            BigInt::from(-27)
        );
        assert_eq!(determinant(&Vec::<Vec<BigInt>>::new()), BigInt::one());
    }

    #[test]
    fn rank_detects_dependence() {
        assert_eq!(rank(&mat(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(rank(&mat(&[&[1, 0, 0], &[0, 0, 1]])), 2);
    }

    #[test]
    fn integral_solve() {
        let rows = mat(&[&[1, 0], &[0, 2]]);
        assert_eq!(solve_integral(&rows, &ints(&[3, 4])), Some(ints(&[3, 2])));
        assert_eq!(solve_integral(&rows, &ints(&[3, 3])), None);
        let line = mat(&[&[1, 1, 0]]);
        assert_eq!(solve_rational(&line, &ints(&[1, 0, 0])), None);
    }

    #[test]
    fn kernel_of_a_functional() {
        let f = mat(&[&[0, -1, 1, 1, 1]]);
        let k = integer_kernel(&f, 5);
        assert_eq!(k.len(), 4);
        for v in &k {
            let dot: BigInt = v.iter().zip(&f[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        // Saturated: e_1 + e_2 has f = 0 and must be an integer combination.
        assert!(solve_integral(&k, &ints(&[0, 1, 1, 0, 0])).is_some());
    }

    #[test]
    fn kernel_without_functionals_is_everything() {
        assert_eq!(integer_kernel(&[], 3), identity(3));
    }

    #[test]
    fn smith_examples() {
        assert_eq!(smith_invariant_factors(&mat(&[&[2, 0], &[0, 3]])), ints(&[1, 6]));
        assert_eq!(smith_invariant_factors(&mat(&[&[2, 4], &[6, 8]])), ints(&[2, 4]));
        assert_eq!(
            smith_invariant_factors(&mat(&[&[2, 0, 0], &[0, 4, 0], &[0, 0, 0]])),
            ints(&[2, 4])
        );
        assert!(smith_invariant_factors(&mat(&[&[0, 0]])).is_empty());
    }
}
