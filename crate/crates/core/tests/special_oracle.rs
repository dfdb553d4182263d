use eosvac_core::special::{erf, erf_real, faddeeva, one_plus_erf};
use eosvac_core::Complex64;

fn oracle() -> Vec<(Complex64, Complex64)> {
    let text = include_str!("data/erf_oracle.txt");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
            (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
        })
        .collect()
}

#[test]
fn complex_erf_matches_high_precision_reference() {
    let rows = oracle();
    assert_eq!(rows.len(), 1000);
    let mut worst = 0.0_f64;
    for (z, want) in rows {
        let got = erf(z);
        let rel = (got - want).norm() / want.norm();
        assert!(rel <= 1e-10, "erf({z}) = {got}, want {want}, rel {rel:e}");
        worst = worst.max(rel);
    }
    println!("worst relative error {worst:e}");
}

#[test]
fn real_axis_agrees_with_real_erf() {
    for k in -40..=40 {
        let x = 0.1 * k as f64;
        let z = erf(Complex64::new(x, 0.0));
        assert!((z.re - erf_real(x)).abs() <= 1e-14, "{x}");
        assert_eq!(z.im, 0.0);
    }
}

#[test]
fn one_plus_erf_keeps_precision_deep_in_the_left_half_plane() {
    // 1 + erf(-x) = erfc(x) ≈ e^{-x²}/(x√π) for large x.
    let x = 6.0;
    let got = one_plus_erf(Complex64::new(-x, 0.0)).re;
    let want = 2.151_973_671_249_891_3e-17;
    assert!((got - want).abs() / want < 1e-10, "{got:e}");
}

#[test]
fn faddeeva_at_zero_and_on_imaginary_axis() {
    assert!((faddeeva(Complex64::new(0.0, 0.0)) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    // w(iy) = e^{y²} erfc(y), w(i) = 0.42758357615580700442
    let w = faddeeva(Complex64::new(0.0, 1.0));
    assert!((w.re - 0.427_583_576_155_807).abs() < 1e-14 && w.im.abs() < 1e-15, "{w}");
}
