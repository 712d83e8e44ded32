mod common;

use adadgs::quadrature::{gauss_hermite_rule, MAX_ORDER};
use common::{gaussian_moment, simpson};

#[test]
fn moments_are_exact_up_to_degree_2m_minus_1() {
    for m in 1..=20 {
        let rule = gauss_hermite_rule(m).unwrap();
        for k in 0..2 * m as u32 {
            let sum: f64 = rule.nodes().iter().zip(rule.weights()).map(|(v, w)| w * v.powi(k as i32)).sum();
            let exact = gaussian_moment(k);
            if k % 2 == 0 {
                assert!((sum - exact).abs() <= 1e-10 * exact, "M={m} k={k}: {sum} vs {exact}");
            } else {
                let scale: f64 = rule.nodes().iter().zip(rule.weights()).map(|(v, w)| w * v.abs().powi(k as i32)).sum();
                assert!(sum.abs() <= 1e-14 * scale.max(1.0), "M={m} k={k}: {sum}");
            }
        }
    }
}

#[test]
fn small_rules_match_numerical_integration() {
    let weight = |v: f64| (-v * v).exp();
    for m in [2, 3] {
        let rule = gauss_hermite_rule(m).unwrap();
        for k in 0..2 * m as i32 {
            let numeric = simpson(|v| v.powi(k) * weight(v), 12.0, 200_000);
            let gh = rule.integrate(|v| v.powi(k));
            assert!((gh - numeric).abs() < 1e-9, "M={m} k={k}: {gh} vs {numeric}");
        }
    }
}

#[test]
fn fixtures() {
    let r2 = gauss_hermite_rule(2).unwrap();
    for (v, e) in r2.nodes().iter().zip([-0.7071067812, 0.7071067812]) {
        assert!((v - e).abs() < 1e-10);
    }
    for w in r2.weights() {
        assert!((w - 0.8862269255).abs() < 1e-10);
    }
    let r3 = gauss_hermite_rule(3).unwrap();
    for (v, e) in r3.nodes().iter().zip([-1.2247448714, 0.0, 1.2247448714]) {
        assert!((v - e).abs() < 1e-10);
    }
    for (w, e) in r3.weights().iter().zip([0.2954089752, 1.1816359006, 0.2954089752]) {
        assert!((w - e).abs() < 1e-10);
    }
    assert_eq!(r3.nodes()[1], 0.0);
}

#[test]
fn higher_orders_agree_on_low_degree_polynomials() {
    let p = |v: f64| 3.0 - v + 0.5 * v * v + 2.0 * v.powi(3) - 0.25 * v.powi(4);
    let reference = gauss_hermite_rule(3).unwrap().integrate(p);
    for m in 4..=MAX_ORDER {
        let value = gauss_hermite_rule(m).unwrap().integrate(p);
        assert!((value - reference).abs() <= 1e-10 * reference.abs(), "M={m}: {value}");
    }
}

#[test]
fn rules_are_shareable_between_threads() {
    let rule = std::sync::Arc::new(gauss_hermite_rule(7).unwrap());
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let r = rule.clone();
            std::thread::spawn(move || r.integrate(|v| v * v))
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), rule.integrate(|v| v * v));
    }
}
