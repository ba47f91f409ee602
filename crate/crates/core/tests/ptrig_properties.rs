use proptest::prelude::*;
use robin_polya::ptrig::{pi_p, PExponent, PTrig};

const EXPONENTS: [f64; 5] = [1.2, 1.5, 2.0, 3.0, 5.0];

fn trig(p: f64) -> PTrig {
    PTrig::with_default_config(PExponent::new(p).unwrap())
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

#[test]
fn pythagorean_identity() {
    for p in EXPONENTS {
        let tr = trig(p);
        let span = 3.0 * tr.pi_p();
        for t in grid(-span, span, 240) {
            let c = tr.cos(t).unwrap();
            let r = c.value.abs().powf(p) + c.derivative.abs().powf(p) - 1.0;
            assert!(r.abs() < 1e-10, "p={p} t={t} residual={r:e}");
        }
    }
}

#[test]
fn hyperbolic_identity() {
    for p in EXPONENTS {
        let tr = trig(p);
        for t in grid(0.0, 3.0, 120) {
            let c = tr.cosh(t).unwrap();
            // Relative form: both terms grow like e^{pt}.
            let r = (c.value.powf(p) - c.derivative.abs().powf(p) - 1.0) / c.value.powf(p).max(1.0);
            assert!(r.abs() < 1e-10, "p={p} t={t} residual={r:e}");
        }
    }
}

#[test]
fn periodicity_and_evenness() {
    for p in EXPONENTS {
        let tr = trig(p);
        let period = 2.0 * tr.pi_p();
        for t in grid(-period, period, 97) {
            let c = tr.cos(t).unwrap().value;
            assert!((tr.cos(t + period).unwrap().value - c).abs() < 1e-10, "p={p} t={t}");
            assert!((tr.cos(-t).unwrap().value - c).abs() < 1e-10, "p={p} t={t}");
        }
    }
}

#[test]
fn cos_of_arccos() {
    for p in EXPONENTS {
        let tr = trig(p);
        for x in grid(0.0, 1.0, 100) {
            let back = tr.cos(tr.arccos(x).unwrap()).unwrap().value;
            assert!((back - x).abs() < 1e-10, "p={p} x={x} back={back}");
        }
    }
}

#[test]
fn arccos_of_cos() {
    for p in EXPONENTS {
        let tr = trig(p);
        for t in grid(0.0, 0.5 * tr.pi_p(), 100) {
            let back = tr.arccos_complement(tr.one_minus_cos(t).unwrap()).unwrap();
            assert!((back - t).abs() < 1e-10, "p={p} t={t} back={back}");
            // Through a rounded x the error is at most one ulp over |cos_p'|.
            let c = tr.cos(t).unwrap();
            let back = tr.arccos(c.value).unwrap();
            let allowed = 1e-10 + 2.0 * f64::EPSILON / c.derivative.abs();
            assert!((back - t).abs() < allowed, "p={p} t={t} back={back}");
        }
    }
}

#[test]
fn cosh_round_trip() {
    for p in EXPONENTS {
        let tr = trig(p);
        for t in grid(0.0, 3.0, 60) {
            let back = tr.arccosh_shift(tr.cosh_minus_one(t).unwrap()).unwrap();
            assert!((back - t).abs() < 1e-10, "p={p} t={t} back={back}");
            let c = tr.cosh(t).unwrap();
            let back = tr.arccosh(c.value).unwrap();
            let allowed = 1e-10 + 2.0 * f64::EPSILON * c.value / c.derivative.abs().max(f64::MIN_POSITIVE);
            assert!((back - t).abs() < allowed, "p={p} t={t} back={back}");
        }
    }
}

#[test]
fn complement_accessors_match_plain_values() {
    for p in EXPONENTS {
        let tr = trig(p);
        for t in grid(-4.0, 4.0, 33) {
            let c = tr.one_minus_cos(t).unwrap();
            assert!((1.0 - c - tr.cos(t).unwrap().value).abs() < 1e-14, "p={p} t={t}");
        }
        for t in grid(0.0, 3.0, 13) {
            let u = tr.cosh_minus_one(t).unwrap();
            assert!((1.0 + u - tr.cosh(t).unwrap().value).abs() < 1e-14 * (1.0 + u), "p={p} t={t}");
        }
    }
}

/// Centered difference of |X'|^{p-2}X' plus μ|X|^{p-2}X for X(s) = cos_p(ωs).
#[test]
fn ode_residual() {
    let phi = |u: f64, p: f64| u.abs().powf(p - 2.0) * u;
    let h = 1e-4;
    for p in EXPONENTS {
        let tr = trig(p);
        for mu in [0.5, 2.0] {
            let omega = (mu / (p - 1.0)).powf(1.0 / p);
            let x = |s: f64| {
                let c = tr.cos(omega * s).unwrap();
                (c.value, omega * c.derivative)
            };
            let period = 2.0 * tr.pi_p() / omega;
            for s in grid(0.0, period, 64) {
                let (xv, xd) = x(s);
                if xv.abs() < 0.05 || xd.abs() < 0.05 {
                    continue;
                }
                let flux = (phi(x(s + h).1, p) - phi(x(s - h).1, p)) / (2.0 * h);
                let r = flux + mu * phi(xv, p);
                assert!(r.abs() < 1e-5, "p={p} mu={mu} s={s} residual={r:e}");
            }
        }
    }
}

#[test]
fn p2_matches_classical() {
    let tr = trig(2.0);
    assert!((tr.pi_p() - std::f64::consts::PI).abs() < 1e-14);
    for t in grid(-7.0, 7.0, 141) {
        let c = tr.cos(t).unwrap();
        assert!((c.value - t.cos()).abs() < 1e-12, "t={t}");
        assert!((c.derivative + t.sin()).abs() < 1e-12, "t={t}");
    }
    for t in grid(0.0, 3.0, 61) {
        let c = tr.cosh(t).unwrap();
        assert!((c.value - t.cosh()).abs() < 1e-12 * t.cosh(), "t={t}");
        assert!((c.derivative - t.sinh()).abs() < 1e-12 * t.cosh(), "t={t}");
    }
    for x in grid(0.0, 1.0, 50) {
        assert!((tr.arccos(x).unwrap() - x.acos()).abs() < 1e-12, "x={x}");
    }
}

proptest! {
    #[test]
    fn pi_p_is_decreasing(a in 1.05f64..8.0, b in 1.05f64..8.0) {
        prop_assume!(a < b);
        let pa = pi_p(PExponent::new(a).unwrap());
        let pb = pi_p(PExponent::new(b).unwrap());
        prop_assert!(pa > pb);
    }

    #[test]
    fn identity_at_random_points(p in 1.1f64..6.0, t in -20.0f64..20.0) {
        let tr = trig(p);
        let c = tr.cos(t).unwrap();
        let r = c.value.abs().powf(p) + c.derivative.abs().powf(p) - 1.0;
        prop_assert!(r.abs() < 1e-10);
        prop_assert!(c.value.abs() <= 1.0 + 1e-15);
    }

    #[test]
    fn arccos_is_monotone(p in 1.1f64..6.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        prop_assume!(x < y);
        let tr = trig(p);
        prop_assert!(tr.arccos(x).unwrap() >= tr.arccos(y).unwrap());
    }
}
