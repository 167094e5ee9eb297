//! Arithmetic on the circle `R mod 1`.

/// Representative of `x` in `[0, 1)`.
pub fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed shortest displacement from `p` to `q`, in `[-1/2, 1/2)`.
pub fn arc(p: f64, q: f64) -> f64 {
    let d = (q - p).rem_euclid(1.0);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

/// Arc-length distance.
pub fn dist(p: f64, q: f64) -> f64 {
    arc(p, q).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_is_shortest() {
        assert!((arc(0.9, 0.1) - 0.2).abs() < 1e-15);
        assert!((arc(0.1, 0.9) + 0.2).abs() < 1e-15);
        assert_eq!(dist(0.25, 0.25), 0.0);
        assert!((dist(0.0, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn wrap_range() {
        for &x in &[-1.5, -1e-18, 0.0, 0.999, 3.25] {
            let w = wrap01(x);
            assert!((0.0..1.0).contains(&w), "{x} -> {w}");
        }
    }
}
