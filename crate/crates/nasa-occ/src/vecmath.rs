//! Small fixed-dimension vector helpers used throughout the crate.
//!
//! Points and directions are plain `[f64; D]`; rotations are row-major
//! `[[f64; D]; D]`. Only `D = 2` and `D = 3` are supported by the few
//! dimension-specific routines (`cross`, rotation constructors).

pub fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        s += a[i] * b[i];
    }
    s
}

pub fn norm<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    let mut r = [0.0; D];
    for i in 0..D {
        r[i] = a[i] + b[i];
    }
    r
}

pub fn sub<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    let mut r = [0.0; D];
    for i in 0..D {
        r[i] = a[i] - b[i];
    }
    r
}

pub fn scale<const D: usize>(a: &[f64; D], s: f64) -> [f64; D] {
    let mut r = [0.0; D];
    for i in 0..D {
        r[i] = a[i] * s;
    }
    r
}

pub fn distance<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    norm(&sub(a, b))
}

/// Cross product; defined for `D = 3` only.
pub fn cross<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    assert_eq!(D, 3, "cross product requires D = 3");
    let mut r = [0.0; D];
    r[0] = a[1] * b[2] - a[2] * b[1];
    r[1] = a[2] * b[0] - a[0] * b[2];
    r[2] = a[0] * b[1] - a[1] * b[0];
    r
}

pub fn mat_identity<const D: usize>() -> [[f64; D]; D] {
    let mut m = [[0.0; D]; D];
    for i in 0..D {
        m[i][i] = 1.0;
    }
    m
}

pub fn mat_mul<const D: usize>(a: &[[f64; D]; D], b: &[[f64; D]; D]) -> [[f64; D]; D] {
    let mut r = [[0.0; D]; D];
    for i in 0..D {
        for k in 0..D {
            let aik = a[i][k];
            for j in 0..D {
                r[i][j] += aik * b[k][j];
            }
        }
    }
    r
}

pub fn mat_vec<const D: usize>(m: &[[f64; D]; D], v: &[f64; D]) -> [f64; D] {
    let mut r = [0.0; D];
    for i in 0..D {
        r[i] = dot(&m[i], v);
    }
    r
}

/// Transposed product `mᵀ·v`.
pub fn mat_tvec<const D: usize>(m: &[[f64; D]; D], v: &[f64; D]) -> [f64; D] {
    let mut r = [0.0; D];
    for i in 0..D {
        for j in 0..D {
            r[j] += m[i][j] * v[i];
        }
    }
    r
}

pub fn mat_transpose<const D: usize>(m: &[[f64; D]; D]) -> [[f64; D]; D] {
    let mut r = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            r[j][i] = m[i][j];
        }
    }
    r
}

pub fn mat_det<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    match D {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => panic!("determinant only implemented for D <= 3"),
    }
}

/// Max absolute entry of `mᵀ·m − I`.
pub fn orthogonality_error<const D: usize>(m: &[[f64; D]; D]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..D {
        for j in 0..D {
            let mut s = 0.0;
            for k in 0..D {
                s += m[k][i] * m[k][j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

/// Deterministic pairwise reduction: merges adjacent pairs until one value
/// remains. The result depends only on the input order, never on thread
/// scheduling, which keeps parallel pipelines reproducible across `--threads`.
pub fn tree_reduce<T>(mut items: Vec<T>, merge: impl Fn(T, T) -> T) -> Option<T> {
    if items.is_empty() {
        return None;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len() / 2 + 1);
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

/// Pairwise sum of a slice (deterministic, better conditioned than a left fold).
pub fn tree_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            tree_sum(&values[..mid]) + tree_sum(&values[mid..])
        }
    }
}
