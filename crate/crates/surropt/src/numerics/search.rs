//! Derivative-free scalar and coordinate searches with hard box bounds.

/// Golden-section ratio `(sqrt(5) - 1) / 2`.
const GOLD: f64 = 0.618_033_988_749_894_9;

/// Golden-section line search on `[lo, hi]`.
///
/// Shrinks the bracket below `tol` and returns the best probed point and its
/// value. Non-finite objective values are treated as worst-possible so the
/// search retreats from them; the returned point always lies in `[lo, hi]`.
pub fn golden_section(
    mut g: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    maximize: bool,
) -> (f64, f64) {
    assert!(lo < hi, "golden_section requires lo < hi");
    assert!(tol > 0.0, "golden_section requires tol > 0");
    let sign = if maximize { 1.0 } else { -1.0 };
    let mut eval = move |x: f64| {
        let v = g(x) * sign;
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - GOLD * (b - a);
    let mut x2 = a + GOLD * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    let (mut best_x, mut best_f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLD * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLD * (b - a);
            f2 = eval(x2);
        }
        if f1 > best_f {
            best_x = x1;
            best_f = f1;
        }
        if f2 > best_f {
            best_x = x2;
            best_f = f2;
        }
    }
    (best_x, best_f * sign)
}

/// Cyclic coordinate ascent with a golden-section line search per axis.
///
/// Runs up to `sweeps` full cycles over the coordinates, keeping every probe
/// inside `[lo, hi]`, and stops early when a full cycle improves the objective
/// by less than `rel_tol * (1 + |g|)`. The returned point never scores below
/// the starting point.
pub fn coordinate_compass_maximize(
    mut g: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    sweeps: usize,
    rel_tol: f64,
) -> Vec<f64> {
    let d = x0.len();
    assert_eq!(lo.len(), d);
    assert_eq!(hi.len(), d);
    for i in 0..d {
        assert!(
            lo[i] <= x0[i] && x0[i] <= hi[i],
            "start point outside the box on axis {i}"
        );
    }
    let finite = |v: f64| if v.is_finite() { v } else { f64::NEG_INFINITY };
    let mut x = x0.to_vec();
    let mut fx = finite(g(&x));
    for _ in 0..sweeps {
        let f_start = fx;
        for i in 0..d {
            if lo[i] == hi[i] {
                continue;
            }
            let tol = rel_tol.max(1e-12) * (hi[i] - lo[i]);
            let (xi, fi) = {
                let mut probe = x.clone();
                golden_section(
                    |t| {
                        probe[i] = t;
                        g(&probe)
                    },
                    lo[i],
                    hi[i],
                    tol,
                    true,
                )
            };
            if fi > fx {
                x[i] = xi;
                fx = fi;
            }
        }
        if fx - f_start <= rel_tol * (1.0 + fx.abs()) {
            break;
        }
    }
    x
}
