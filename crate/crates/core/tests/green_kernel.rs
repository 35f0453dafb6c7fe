use proptest::prelude::*;
use rocketbvp::green::{green_constants, green_dt, green_dt_sided, green_paper, ConstantsComparison, Interval};
use rocketbvp::Side;

/// Maximises a trapezoid quadrature of `s -> k(t, s)` over a uniform t-grid.
/// Each inner integral is split at `s = t` so the kink never straddles a cell.
fn max_of_quadrature(iv: &Interval, n_t: usize, n_s: usize, k: impl Fn(f64, f64, Side) -> f64) -> f64 {
    let trap = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let h = (b - a) / n_s as f64;
        let inner: f64 = (1..n_s).map(|j| f(a + j as f64 * h)).sum();
        h * (0.5 * f(a) + inner + 0.5 * f(b))
    };
    (0..=n_t)
        .map(|i| {
            let t = iv.t0 + iv.length() * i as f64 / n_t as f64;
            trap(iv.t0, t, &|s| k(t, s, Side::Right)) + trap(t, iv.t1, &|s| k(t, s, Side::Left))
        })
        .fold(f64::MIN, f64::max)
}

fn kernel_sup(iv: &Interval) -> (f64, f64) {
    let g0 = max_of_quadrature(iv, 10_000, 64, |t, s, _| green_paper(t, s, iv).unwrap());
    let g1 = max_of_quadrature(iv, 10_000, 64, |t, s, side| {
        green_dt_sided(t, s, iv, side).unwrap().abs()
    });
    (g0, g1)
}

#[test]
fn constants_match_quadrature_maximisation() {
    for (t0, t1) in [(0.0, 1.0), (0.0, 2.0), (-3.0, 57.0)] {
        let iv = Interval::new(t0, t1).unwrap();
        let (q0, q1) = kernel_sup(&iv);
        let c = green_constants(&iv);
        assert!((q0 - c.g0).abs() <= 1e-6 * c.g0, "G0 on [{t0},{t1}]: {q0} vs {}", c.g0);
        assert!((q1 - c.g1).abs() <= 1e-6 * c.g1, "G1 on [{t0},{t1}]: {q1} vs {}", c.g1);
        assert!(ConstantsComparison::new(&iv).deviates());
    }
}

#[test]
fn kernel_inverts_second_derivative_with_minus_sign() {
    // u(t) = ∫ G(t, s) 2 ds should be t (1 - t) on [0, 1]
    let iv = Interval::new(0.0, 1.0).unwrap();
    let mut prev = f64::INFINITY;
    for n in [16usize, 32, 64] {
        let h = 1.0 / n as f64;
        let mut err = 0.0f64;
        for i in 0..=n {
            let t = i as f64 * h;
            let u: f64 = (0..n)
                .map(|j| {
                    let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
                    0.5 * h * 2.0 * (green_paper(t, a, &iv).unwrap() + green_paper(t, b, &iv).unwrap())
                })
                .sum();
            err = err.max((u - t * (1.0 - t)).abs());
        }
        assert!(err <= prev.max(1e-15) + 1e-15);
        assert!(err < 1e-12, "kink-aligned trapezoid is exact here, got {err}");
        prev = err;
    }
    // second difference at the quadrature nodes recovers u'' = -2
    let n = 100;
    let h = 1.0 / n as f64;
    let u = |t: f64| -> f64 {
        (0..n)
            .map(|j| {
                let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
                h * (green_paper(t, a, &iv).unwrap() + green_paper(t, b, &iv).unwrap())
            })
            .sum()
    };
    for i in 1..n {
        let t = i as f64 * h;
        let second = (u(t - h) - 2.0 * u(t) + u(t + h)) / (h * h);
        assert!((second + 2.0).abs() < 1e-9, "{second}");
    }
}

fn interval() -> impl Strategy<Value = Interval> {
    (-100.0f64..100.0, 0.1f64..200.0).prop_map(|(t0, len)| Interval::new(t0, t0 + len).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn symmetric_and_non_negative(iv in interval(), u in 0.0f64..=1.0, w in 0.0f64..=1.0) {
        let t = iv.t0 + u * iv.length();
        let s = iv.t0 + w * iv.length();
        let g = green_paper(t, s, &iv).unwrap();
        prop_assert_eq!(g, green_paper(s, t, &iv).unwrap());
        prop_assert!(g >= 0.0);
        prop_assert_eq!(green_paper(iv.t0, s, &iv).unwrap(), 0.0);
        prop_assert_eq!(green_paper(iv.t1, s, &iv).unwrap(), 0.0);
    }

    #[test]
    fn affine_off_the_diagonal(iv in interval(), w in 0.05f64..0.95, frac in 0.0f64..1.0) {
        let s = iv.t0 + w * iv.length();
        // three equally spaced nodes strictly left of s, then right of s
        for (lo, hi) in [(iv.t0, s), (s, iv.t1)] {
            let span = (hi - lo) * 0.98;
            let start = lo + 0.01 * (hi - lo);
            let d = span * (0.1 + 0.4 * frac) / 2.0;
            let t = start;
            let g = |t: f64| green_paper(t, s, &iv).unwrap();
            let second = g(t) - 2.0 * g(t + d) + g(t + 2.0 * d);
            let scale = g(t).abs() + g(t + d).abs() + g(t + 2.0 * d).abs() + 1.0;
            prop_assert!(second.abs() <= 1e-12 * scale, "{}", second);
        }
    }

    #[test]
    fn unit_derivative_jump(iv in interval(), w in 0.01f64..0.99) {
        let t = iv.t0 + w * iv.length();
        let above = green_dt_sided(t, t, &iv, Side::Left).unwrap();
        let below = green_dt_sided(t, t, &iv, Side::Right).unwrap();
        prop_assert!((above - below - 1.0).abs() <= 1e-12);

        // finite differences in t on either side of the diagonal
        let eps = 1e-3 * iv.length();
        let g = |t: f64| green_paper(t, iv.t0 + w * iv.length(), &iv).unwrap();
        let right = (g(t + 2.0 * eps) - g(t + eps)) / eps;
        let left = (g(t - eps) - g(t - 2.0 * eps)) / eps;
        prop_assert!((left - right - 1.0).abs() <= 1e-8 * (1.0 + iv.length()), "{}", left - right);
    }

    #[test]
    fn derivative_matches_difference_quotient(iv in interval(), u in 0.05f64..0.95, w in 0.05f64..0.95) {
        prop_assume!((u - w).abs() > 0.01);
        let t = iv.t0 + u * iv.length();
        let s = iv.t0 + w * iv.length();
        let eps = 1e-7 * iv.length();
        let fd = (green_paper(t + eps, s, &iv).unwrap() - green_paper(t - eps, s, &iv).unwrap()) / (2.0 * eps);
        prop_assert!((fd - green_dt(t, s, &iv).unwrap()).abs() < 1e-6);
    }
}
