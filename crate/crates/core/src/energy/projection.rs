//! Euclidean projections used by the concrete energies.

/// Projection of `v` onto `{ g : sum_i c_i |g_i| <= radius }` in the
/// Euclidean metric, with `c_i > 0`.
///
/// The solution is `g_i = sign(v_i) max(|v_i| - mu c_i, 0)` where `mu >= 0`
/// is the pivot making the constraint active; the pivot is found exactly by
/// scanning the sorted breakpoints `|v_i| / c_i`.
pub fn weighted_l1_ball(v: &[f64], c: &[f64], radius: f64) -> Vec<f64> {
    debug_assert_eq!(v.len(), c.len());
    let load: f64 = v.iter().zip(c).map(|(x, w)| w * x.abs()).sum();
    if load <= radius {
        return v.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; v.len()];
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| (v[b].abs() / c[b]).total_cmp(&(v[a].abs() / c[a])));

    // With the k largest breakpoints active, f(mu) = S1 - mu S2 where
    // S1 = sum c_i |v_i| and S2 = sum c_i^2 over the active set.
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut mu = 0.0;
    for (k, &i) in order.iter().enumerate() {
        s1 += c[i] * v[i].abs();
        s2 += c[i] * c[i];
        let candidate = (s1 - radius) / s2;
        let next_break = order.get(k + 1).map(|&j| v[j].abs() / c[j]).unwrap_or(0.0);
        if candidate >= next_break {
            mu = candidate;
            break;
        }
    }
    v.iter()
        .zip(c)
        .map(|(&x, &w)| x.signum() * (x.abs() - mu * w).max(0.0))
        .map(|g| if g == 0.0 { 0.0 } else { g })
        .collect()
}

/// Projection onto the box `|g_i| <= bound_i` (separable, so valid in any
/// diagonal metric).
pub fn box_clamp(v: &[f64], bound: &[f64]) -> Vec<f64> {
    v.iter().zip(bound).map(|(&x, &b)| x.clamp(-b, b)).collect()
}
