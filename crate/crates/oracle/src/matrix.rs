//! Dense rational matrices: rank and products by plain elimination.

use num_traits::Zero;

use crate::Q;

pub type Mat = Vec<Vec<Q>>;

pub fn rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, p) in row[c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x -= &f * p;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn is_zero(m: &Mat) -> bool {
    m.iter().flatten().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn ranks() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rank(&m), 1);
        let id = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert_eq!(rank(&id), 2);
        assert_eq!(mul(&m, &id), m);
    }
}
