//! Fixed-size elimination over `F_p` for the enumeration hot loops.
//!
//! Rows are `[u32; C]` with entries already reduced mod `p < 2^31`; products
//! fit in `u64`. Nothing here allocates.

#[inline]
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    // Extended Euclid on (a, p); a != 0.
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(p as i64) as u32
}

#[inline]
fn mulm(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

/// In-place reduced row echelon form of five rows; returns the rank and the
/// pivot columns (first `rank` entries meaningful).
pub(crate) fn rref5<const C: usize>(rows: &mut [[u32; C]; 5], p: u32) -> (usize, [usize; 5]) {
    let mut pivots = [0usize; 5];
    let mut r = 0;
    for c in 0..C {
        if r == 5 {
            break;
        }
        let Some(pr) = (r..5).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = mulm(*v, inv, p);
        }
        let pivot_row = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for (v, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                *v = ((*v as u64 + f as u64 * pv as u64) % p as u64) as u32;
            }
        }
        pivots[r] = c;
        r += 1;
    }
    (r, pivots)
}

/// Rank of a 5x5 matrix by forward elimination; an independent check on `rref5`.
#[cfg(test)]
pub(crate) fn rank5(m: &[[u32; 5]; 5], p: u32) -> usize {
    let mut rows = *m;
    let mut r = 0;
    for c in 0..5 {
        let Some(pr) = (r..5).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = inv_mod(rows[r][c], p);
        let pivot_row = rows[r];
        for row in rows.iter_mut().skip(r + 1) {
            if row[c] == 0 {
                continue;
            }
            let f = p - mulm(row[c], inv, p);
            for j in c..5 {
                row[j] = ((row[j] as u64 + f as u64 * pivot_row[j] as u64) % p as u64) as u32;
            }
        }
        r += 1;
    }
    r
}

/// Determinant of a 5x5 matrix.
pub(crate) fn det5(m: &[[u32; 5]; 5], p: u32) -> u32 {
    let mut rows = *m;
    let mut acc = 1u32;
    for c in 0..5 {
        let Some(pr) = (c..5).find(|&i| rows[i][c] != 0) else {
            return 0;
        };
        if pr != c {
            rows.swap(c, pr);
            acc = p - acc;
        }
        acc = mulm(acc, rows[c][c], p);
        let inv = inv_mod(rows[c][c], p);
        let pivot_row = rows[c];
        for row in rows.iter_mut().skip(c + 1) {
            if row[c] == 0 {
                continue;
            }
            let f = p - mulm(row[c], inv, p);
            for j in c..5 {
                row[j] = ((row[j] as u64 + f as u64 * pivot_row[j] as u64) % p as u64) as u32;
            }
        }
    }
    acc % p
}

/// Basis of the right kernel of a 5x5 matrix (up to five vectors).
pub(crate) fn kernel5(m: &[[u32; 5]; 5], p: u32) -> Vec<[u32; 5]> {
    let mut rows = *m;
    let (rank, pivots) = rref5(&mut rows, p);
    let pivots = &pivots[..rank];
    (0..5)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = [0u32; 5];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rows[i][free]) % p;
            }
            v
        })
        .collect()
}
