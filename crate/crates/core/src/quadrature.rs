//! Adaptive Simpson quadrature with caller-supplied breakpoints.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("quadrature did not converge: achieved error estimate {achieved:e} > tolerance {tolerance:e}")]
pub struct QuadratureError {
    pub achieved: f64,
    pub tolerance: f64,
}

/// Integral value with the accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
}

const MAX_DEPTH: u32 = 48;

struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

fn adapt<T: Real, F: Fn(T) -> T>(f: &F, p: Panel<T>, tol: T, depth: u32, err: &mut T) -> T {
    let two = T::lit(2.0);
    let m = (p.a + p.b) / two;
    let lm = (p.a + m) / two;
    let rm = (m + p.b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let diff = left + right - p.whole;
    if depth >= MAX_DEPTH || diff.abs() <= T::lit(15.0) * tol {
        *err += diff.abs() / T::lit(15.0);
        return left + right + diff / T::lit(15.0);
    }
    let half = tol / two;
    adapt(
        f,
        Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
        },
        half,
        depth + 1,
        err,
    ) + adapt(
        f,
        Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
        },
        half,
        depth + 1,
        err,
    )
}

/// Integrates `f` over `[a, b]`, splitting at every breakpoint strictly inside
/// the interval. `tol` is an absolute tolerance shared across the pieces.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    breakpoints: &[T],
    tol: T,
) -> Result<Integral<T>, QuadratureError> {
    if b <= a {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
        });
    }
    let mut cuts: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    cuts.dedup();

    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(a);
    nodes.extend(cuts);
    nodes.push(b);

    // Each piece starts from 8 sub-panels so that narrow features are seen.
    let pieces = (nodes.len() - 1) * 8;
    let piece_tol = tol / T::from_usize(pieces).unwrap();
    let mut value = T::zero();
    let mut error = T::zero();
    for w in nodes.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let step = (hi - lo) / T::lit(8.0);
        for i in 0..8 {
            let pa = lo + step * T::from_usize(i).unwrap();
            let pb = if i == 7 { hi } else { pa + step };
            let pm = (pa + pb) / T::lit(2.0);
            let (fa, fm, fb) = (f(pa), f(pm), f(pb));
            let whole = simpson(pa, pb, fa, fm, fb);
            value += adapt(
                &f,
                Panel {
                    a: pa,
                    b: pb,
                    fa,
                    fm,
                    fb,
                    whole,
                },
                piece_tol,
                0,
                &mut error,
            );
        }
    }
    if !value.is_finite() || error > tol * T::lit(100.0) {
        return Err(QuadratureError {
            achieved: error.as_f64(),
            tolerance: tol.as_f64(),
        });
    }
    Ok(Integral { value, error })
}
