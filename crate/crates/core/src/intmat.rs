//! Small dense integer matrices (row-major `Vec<Vec<i64>>`).

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &IntMatrix, v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IntMatrix) -> i64 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    (sign * m[n - 1][n - 1]) as i64
}

/// Inverse of a unimodular matrix, via the adjugate.
pub fn inverse_unimodular(a: &IntMatrix) -> Option<IntMatrix> {
    let n = a.len();
    let d = det(a);
    if d.abs() != 1 {
        return None;
    }
    let minor = |r: usize, c: usize| -> IntMatrix {
        a.iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect())
            .collect()
    };
    Some(
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                        s * det(&minor(j, i)) * d
                    })
                    .collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let a = vec![vec![0, 1, 0], vec![-1, 2, 0], vec![0, 0, 1]];
        assert_eq!(det(&a), 1);
        let inv = inverse_unimodular(&a).unwrap();
        assert_eq!(matmul(&a, &inv), identity(3));
        assert_eq!(det(&vec![vec![2, 0], vec![0, 3]]), 6);
        assert_eq!(det(&vec![vec![0, 1], vec![1, 0]]), -1);
    }
}
