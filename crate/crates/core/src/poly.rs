//! Real roots of low-degree polynomials with explicit double-root handling.

/// Roots of a x^2 + b x + c = 0, ascending. A discriminant within
/// `1e-12` of zero *relative to the coefficient scale* is treated as a
/// double root and reported once, so tangent bifurcations give a
/// deterministic count.
pub fn quadratic_real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    let scale = (b * b).max((4.0 * a * c).abs()).max(f64::MIN_POSITIVE);
    if disc.abs() <= 1e-12 * scale {
        return vec![-b / (2.0 * a)];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    // Citardauq pairing avoids cancellation in the small root.
    let q = -0.5 * (b + disc.sqrt().copysign(if b == 0.0 { 1.0 } else { b }));
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

/// Real roots of a x^3 + b x^2 + c x + d = 0 (a != 0), ascending,
/// without multiplicity: a double root is reported once.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    assert!(a != 0.0, "cubic leading coefficient must be nonzero");
    // Depressed form t^3 + p t + q with x = t - b/(3a).
    let shift = b / (3.0 * a);
    let p = c / a - shift * shift * 3.0;
    let q = 2.0 * shift.powi(3) - shift * (c / a) + d / a;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p.powi(3);
    let scale = (half_q * half_q).max(third_p.powi(3).abs()).max(f64::MIN_POSITIVE);

    let mut roots = if disc.abs() <= 1e-12 * scale {
        // Boundary: double root (or triple when p = q = 0).
        if p.abs() <= 1e-12 {
            vec![0.0]
        } else {
            let double = -1.5 * q / p;
            let simple = 3.0 * q / p;
            let mut r = vec![double, simple];
            r.sort_by(|x, y| x.partial_cmp(y).unwrap());
            r.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (x.abs() + y.abs()).max(1e-300));
            r
        }
    } else if disc > 0.0 {
        // One real root (Cardano, sign-stable branch).
        let s = disc.sqrt();
        let u = (-half_q + s).cbrt();
        let v = (-half_q - s).cbrt();
        vec![u + v]
    } else {
        // Three distinct real roots (trigonometric form).
        let m = 2.0 * (-third_p).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        let mut r: Vec<f64> = (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect();
        r.sort_by(|x, y| x.partial_cmp(y).unwrap());
        r
    };

    for r in roots.iter_mut() {
        *r -= shift;
        // One Newton polish step against the original coefficients. Near a
        // double root the derivative collapses, so only small corrections
        // are trusted.
        let f = ((a * *r + b) * *r + c) * *r + d;
        let df = (3.0 * a * *r + 2.0 * b) * *r + c;
        if df != 0.0 {
            let step = f / df;
            if step.is_finite() && step.abs() <= 1e-3 * r.abs().max(1.0) {
                *r -= step;
            }
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}
