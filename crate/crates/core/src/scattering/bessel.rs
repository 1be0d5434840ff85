//! Riccati–Bessel functions `ĵ_ℓ(x) = x j_ℓ(x)` and `n̂_ℓ(x) = -x y_ℓ(x)`,
//! normalized so that `ĵ_ℓ ~ sin(x - ℓπ/2)` and `n̂_ℓ ~ cos(x - ℓπ/2)`.

/// `j_0 … j_ℓ` at `x > 0`.
fn spherical_j(l: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; l + 1];
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    out[0] = j0;
    if l == 0 {
        return out;
    }
    let j1 = s / (x * x) - c / x;
    if x > l as f64 {
        out[1] = j1;
        for n in 1..l {
            out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
        }
        return out;
    }
    // Miller: recur downward from well above ℓ, then normalize.
    let start = l + 30 + x.ceil() as usize;
    let mut next = 0.0;
    let mut cur = 1e-300;
    for n in (1..=start).rev() {
        let prev = (2 * n + 1) as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if n - 1 <= l {
            out[n - 1] = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / out[0] } else { j1 / out[1] };
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// `y_0 … y_ℓ` at `x > 0`; upward recurrence is stable for `y`.
fn spherical_y(l: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; l + 1];
    let (s, c) = x.sin_cos();
    out[0] = -c / x;
    if l >= 1 {
        out[1] = -c / (x * x) - s / x;
    }
    for n in 1..l {
        out[n + 1] = (2 * n + 1) as f64 / x * out[n] - out[n - 1];
    }
    out
}

/// `(ĵ_ℓ, ĵ'_ℓ, n̂_ℓ, n̂'_ℓ)` at `x > 0`, derivatives with respect to `x`.
pub fn riccati(l: u32, x: f64) -> (f64, f64, f64, f64) {
    assert!(x > 0.0, "Riccati–Bessel functions need x > 0");
    if l == 0 {
        let (s, c) = x.sin_cos();
        return (s, c, c, -s);
    }
    let l = l as usize;
    let j = spherical_j(l, x);
    let y = spherical_y(l, x);
    let lf = l as f64;
    (
        x * j[l],
        x * j[l - 1] - lf * j[l],
        -x * y[l],
        -(x * y[l - 1] - lf * y[l]),
    )
}
