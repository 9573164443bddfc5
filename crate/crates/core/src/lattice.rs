//! Integer row reduction: Hermite and Smith normal forms with unimodular transforms.

pub type IntMatrix = Vec<Vec<i128>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()
        })
        .collect()
}

/// Row-style Hermite normal form: returns (U, H) with U unimodular and U·A = H.
/// Pivots are positive, entries above a pivot are reduced into [0, pivot).
pub fn hermite(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u = identity(m);
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        // gcd elimination below the pivot row
        loop {
            let nz: Vec<usize> = (row..m).filter(|&r| h[r][col] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&r| h[r][col].abs()).unwrap();
            h.swap(row, p);
            u.swap(row, p);
            let mut done = true;
            for r in row + 1..m {
                if h[r][col] != 0 {
                    let q = h[r][col].div_euclid(h[row][col]);
                    sub_row(&mut h, r, row, q);
                    sub_row(&mut u, r, row, q);
                    if h[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[row][col] == 0 {
            continue;
        }
        if h[row][col] < 0 {
            negate_row(&mut h, row);
            negate_row(&mut u, row);
        }
        for r in 0..row {
            let q = h[r][col].div_euclid(h[row][col]);
            if q != 0 {
                sub_row(&mut h, r, row, q);
                sub_row(&mut u, r, row, q);
            }
        }
        row += 1;
    }
    (u, h)
}

/// Rows of U spanning the integer left kernel {y : y·A = 0}.
pub fn left_kernel(a: &IntMatrix) -> IntMatrix {
    let (u, h) = hermite(a);
    h.iter()
        .zip(u)
        .filter(|(hr, _)| hr.iter().all(|&x| x == 0))
        .map(|(_, ur)| ur)
        .collect()
}

/// Smith normal form: returns (U, D, V) with U·A·V = D diagonal, d_i | d_{i+1}, d_i ≥ 0.
pub fn smith(a: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    for t in 0..m.min(n) {
        // pick smallest nonzero entry in the trailing block
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[i][j] != 0
                        && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return (u, d, v);
            };
            d.swap(t, bi);
            u.swap(t, bi);
            swap_cols(&mut d, t, bj);
            swap_cols(&mut v, t, bj);
            let mut clean = true;
            for i in t + 1..m {
                let q = d[i][t].div_euclid(d[t][t]);
                if q != 0 {
                    sub_row(&mut d, i, t, q);
                    sub_row(&mut u, i, t, q);
                }
                if d[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = d[t][j].div_euclid(d[t][t]);
                if q != 0 {
                    sub_col(&mut d, j, t, q);
                    sub_col(&mut v, j, t, q);
                }
                if d[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| d[i][j] % d[t][t] != 0);
            match bad {
                Some((i, _)) => {
                    add_row(&mut d, t, i);
                    add_row(&mut u, t, i);
                }
                None => break,
            }
        }
        if d[t][t] < 0 {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    (u, d, v)
}

fn sub_row(m: &mut IntMatrix, target: usize, src: usize, q: i128) {
    for c in 0..m[target].len() {
        let s = m[src][c];
        m[target][c] -= q * s;
    }
}

fn add_row(m: &mut IntMatrix, target: usize, src: usize) {
    sub_row(m, target, src, -1);
}

fn negate_row(m: &mut IntMatrix, r: usize) {
    for x in &mut m[r] {
        *x = -*x;
    }
}

fn sub_col(m: &mut IntMatrix, target: usize, src: usize, q: i128) {
    for row in m.iter_mut() {
        row[target] -= q * row[src];
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec(-3i128..=3, n), m)
        })
    }

    fn det(m: &IntMatrix) -> i128 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: IntMatrix =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum()
    }

    #[test]
    fn hermite_example() {
        let a = vec![vec![2, 4], vec![1, 3], vec![3, 7]];
        let (u, h) = hermite(&a);
        assert_eq!(matmul(&u, &a), h);
        assert_eq!(h, vec![vec![1, 1], vec![0, 2], vec![0, 0]]);
        let k = left_kernel(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(matmul(&k, &a), vec![vec![0, 0]]);
    }

    #[test]
    fn smith_example() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let (u, d, v) = smith(&a);
        assert_eq!(matmul(&matmul(&u, &a), &v), d);
        assert_eq!((d[0][0], d[1][1], d[2][2]), (2, 6, 12));
    }

    proptest! {
        #[test]
        fn hermite_transform_is_unimodular(a in small_matrix()) {
            let (u, h) = hermite(&a);
            prop_assert_eq!(matmul(&u, &a), h);
            prop_assert_eq!(det(&u).abs(), 1);
        }

        #[test]
        fn smith_is_diagonal_with_divisibility(a in small_matrix()) {
            let (u, d, v) = smith(&a);
            prop_assert_eq!(matmul(&matmul(&u, &a), &v), d.clone());
            prop_assert_eq!(det(&u).abs(), 1);
            prop_assert_eq!(det(&v).abs(), 1);
            let k = d.len().min(d[0].len());
            for i in 0..d.len() {
                for j in 0..d[0].len() {
                    if i != j { prop_assert_eq!(d[i][j], 0); }
                }
            }
            for i in 1..k {
                if d[i][i] != 0 {
                    prop_assert!(d[i - 1][i - 1] != 0 && d[i][i] % d[i - 1][i - 1] == 0);
                }
            }
        }
    }
}
