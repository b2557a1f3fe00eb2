/// One classical Runge-Kutta step for an N-dimensional system.
#[inline]
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: [f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, &y);
    let y2 = axpy(&y, 0.5 * h, &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let y3 = axpy(&y, 0.5 * h, &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let y4 = axpy(&y, h, &k3);
    let k4 = f(t + h, &y4);
    let mut out = y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}
