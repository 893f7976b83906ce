//! Row-major dense tensor kernels shared by the operator types.
//!
//! Tensors are flat `Vec<Complex64>` buffers paired with a shape; the last
//! axis varies fastest. These helpers stay `pub(crate)`: the public surface
//! works with [`crate::MultiMap`] and friends.

use num_complex::Complex64;

pub(crate) const CZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn total_len(shape: &[usize]) -> usize {
    shape.iter().product()
}

/// Flat offset of `idx` in a row-major layout of `shape`.
pub(crate) fn offset(shape: &[usize], idx: &[usize]) -> usize {
    debug_assert_eq!(shape.len(), idx.len());
    let mut off = 0;
    for (d, i) in shape.iter().zip(idx) {
        debug_assert!(i < d);
        off = off * d + i;
    }
    off
}

/// Advances `idx` one step in row-major order; returns `false` after the last
/// index wraps back to all zeros.
pub(crate) fn step(shape: &[usize], idx: &mut [usize]) -> bool {
    for ax in (0..shape.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < shape[ax] {
            return true;
        }
        idx[ax] = 0;
    }
    false
}

/// Contracts the last axis with a vector: `out[o] = Σ_i t[o, i] · x[i]`.
pub(crate) fn contract_last(data: &[Complex64], last: usize, x: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(data.len() % last, 0);
    debug_assert_eq!(x.len(), last);
    let outer = data.len() / last;
    let mut out = Vec::with_capacity(outer);
    for o in 0..outer {
        let row = &data[o * last..(o + 1) * last];
        let mut acc = CZERO;
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        out.push(acc);
    }
    out
}

/// Contracts one axis with a vector: `out[o, i] = Σ_a t[o, a, i] · x[a]`.
pub(crate) fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    x: &[Complex64],
) -> (Vec<Complex64>, Vec<usize>) {
    let k = shape[axis];
    debug_assert_eq!(x.len(), k);
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![CZERO; outer * inner];
    for o in 0..outer {
        let in_base = o * k * inner;
        let out_base = o * inner;
        for (a, &xa) in x.iter().enumerate() {
            if xa == CZERO {
                continue;
            }
            let src = &data[in_base + a * inner..in_base + (a + 1) * inner];
            let dst = &mut out[out_base..out_base + inner];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += xa * s;
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape.remove(axis);
    (out, new_shape)
}

/// Mode product along `axis`: replaces the axis of size `k` by one of size
/// `f`, with `out[o, f, i] = Σ_k t[o, k, i] · m[k, f]` and `m` row-major
/// `k × f`. Zero matrix entries are skipped, so contraction against an
/// identity matrix reproduces the input bit for bit.
pub(crate) fn mode_product(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    m: &[Complex64],
    f: usize,
) -> (Vec<Complex64>, Vec<usize>) {
    let k = shape[axis];
    debug_assert_eq!(m.len(), k * f);
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![CZERO; outer * f * inner];
    for o in 0..outer {
        let in_base = o * k * inner;
        let out_base = o * f * inner;
        for kk in 0..k {
            let src = &data[in_base + kk * inner..in_base + (kk + 1) * inner];
            for ff in 0..f {
                let c = m[kk * f + ff];
                if c == CZERO {
                    continue;
                }
                let dst = &mut out[out_base + ff * inner..out_base + (ff + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += c * s;
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = f;
    (out, new_shape)
}

/// Rearranges entries so that `out[idx] = data[src(idx)]`, where `src` fills
/// the source multi-index for a destination multi-index.
pub(crate) fn reindex(
    data: &[Complex64],
    in_shape: &[usize],
    out_shape: &[usize],
    mut src: impl FnMut(&[usize], &mut [usize]),
) -> Vec<Complex64> {
    debug_assert_eq!(total_len(in_shape), total_len(out_shape));
    let mut out = vec![CZERO; data.len()];
    if data.is_empty() {
        return out;
    }
    let mut out_idx = vec![0usize; out_shape.len()];
    let mut in_idx = vec![0usize; in_shape.len()];
    let mut pos = 0;
    loop {
        src(&out_idx, &mut in_idx);
        out[pos] = data[offset(in_shape, &in_idx)];
        pos += 1;
        if !step(out_shape, &mut out_idx) {
            break;
        }
    }
    out
}

/// Matricization of a tensor: rows run over `axis`, columns over the
/// remaining axes in their original order. Returns `(matrix, rows, cols)`.
pub(crate) fn matricize(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
) -> (Vec<Complex64>, usize, usize) {
    let rows = shape[axis];
    let cols = data.len() / rows;
    if axis == 0 {
        return (data.to_vec(), rows, cols);
    }
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![CZERO; data.len()];
    for o in 0..outer {
        for r in 0..rows {
            let src = &data[(o * rows + r) * inner..(o * rows + r + 1) * inner];
            let dst = &mut out[r * cols + o * inner..r * cols + (o + 1) * inner];
            dst.copy_from_slice(src);
        }
    }
    (out, rows, cols)
}

/// Dense matrix product of row-major `a` (`n × m`) and `b` (`m × p`).
pub(crate) fn matmul(
    a: &[Complex64],
    b: &[Complex64],
    n: usize,
    m: usize,
    p: usize,
) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), n * m);
    debug_assert_eq!(b.len(), m * p);
    let mut out = vec![CZERO; n * p];
    for i in 0..n {
        for kk in 0..m {
            let aik = a[i * m + kk];
            if aik == CZERO {
                continue;
            }
            let brow = &b[kk * p..(kk + 1) * p];
            let orow = &mut out[i * p..(i + 1) * p];
            for (o, bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
    out
}

/// Conjugate transpose of a row-major `n × m` matrix.
pub(crate) fn conj_transpose(a: &[Complex64], n: usize, m: usize) -> Vec<Complex64> {
    let mut out = vec![CZERO; a.len()];
    for i in 0..n {
        for j in 0..m {
            out[j * n + i] = a[i * m + j].conj();
        }
    }
    out
}

pub(crate) fn max_abs(data: &[Complex64]) -> f64 {
    data.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
