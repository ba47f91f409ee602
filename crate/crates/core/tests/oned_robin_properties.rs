use proptest::prelude::*;
use rayon::prelude::*;
use robin_polya::oned_robin::{
    dirichlet_ceiling, eigenfunction_samples, mu1, mu1_discrete_oracle, negative_beta_ceiling,
    transcendental_residual, Branch, RobinParams, DEFAULT_TOL,
};
use robin_polya::ptrig::PExponent;

const PS: [f64; 3] = [1.5, 2.0, 3.0];
const BETAS: [f64; 5] = [-2.0, -0.5, 0.5, 1.0, 5.0];
const S0S: [f64; 3] = [0.25, 1.0, 4.0];

fn sweep() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for p in PS {
        for beta in BETAS {
            for s0 in S0S {
                out.push((p, beta, s0));
            }
        }
    }
    out
}

fn mu(p: f64, beta: f64, s0: f64) -> f64 {
    mu1(&RobinParams::new(p, beta, s0).unwrap(), DEFAULT_TOL).unwrap().mu
}

/// Independent p = 2 oracle: bisection on the tan / tanh reductions.
fn p2_reference(beta: f64, s0: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = if beta > 0.0 { std::f64::consts::FRAC_PI_2 / s0 } else { 2.0 * beta.abs() + 10.0 / s0 };
    let f = |w: f64| {
        if beta > 0.0 {
            w * (w * s0).sin() - beta * (w * s0).cos()
        } else {
            w * (w * s0).tanh() + beta
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    let w = 0.5 * (lo + hi);
    if beta > 0.0 {
        w * w
    } else {
        -w * w
    }
}

#[test]
fn p2_matches_reductions() {
    for beta in BETAS {
        for s0 in S0S {
            let m = mu(2.0, beta, s0);
            let r = p2_reference(beta, s0);
            assert!((m - r).abs() < 1e-9 * r.abs().max(1.0), "beta={beta} s0={s0}: {m} vs {r}");
        }
    }
}

#[test]
fn residual_is_tiny() {
    for (p, beta, s0) in sweep() {
        let params = RobinParams::new(p, beta, s0).unwrap();
        let r = transcendental_residual(&params, mu(p, beta, s0)).unwrap();
        assert!(r.abs() < 1e-9, "({p}, {beta}, {s0}) residual {r:e}");
    }
}

#[test]
fn dirichlet_and_negative_ceilings() {
    for (p, beta, s0) in sweep() {
        let m = mu(p, beta, s0);
        let pe = PExponent::new(p).unwrap();
        if beta > 0.0 {
            assert!(m < dirichlet_ceiling(pe, s0), "({p}, {beta}, {s0})");
            assert!(m <= beta / s0 + 1e-10, "({p}, {beta}, {s0})");
            assert!(m > 0.0);
        } else {
            assert!(m <= negative_beta_ceiling(pe, beta) + 1e-10, "({p}, {beta}, {s0})");
        }
    }
}

#[test]
fn branch_follows_sign_of_beta() {
    for (p, beta, s0) in sweep() {
        let r = mu1(&RobinParams::new(p, beta, s0).unwrap(), DEFAULT_TOL).unwrap();
        let expected = if beta > 0.0 { Branch::Trigonometric } else { Branch::Hyperbolic };
        assert_eq!(r.branch, expected);
        assert!(r.bracket.0 <= r.mu && r.mu <= r.bracket.1);
    }
}

#[test]
fn eigenfunction_is_monotone_and_positive() {
    for (p, beta, s0) in sweep() {
        let params = RobinParams::new(p, beta, s0).unwrap();
        let r = mu1(&params, DEFAULT_TOL).unwrap();
        let grid: Vec<f64> = (0..=50).map(|i| s0 * i as f64 / 50.0).collect();
        let x = eigenfunction_samples(&params, &r, &grid).unwrap();
        assert!(x.iter().all(|v| v.value > 0.0));
        for w in x.windows(2) {
            if beta > 0.0 {
                assert!(w[1].value <= w[0].value + 1e-14);
            } else {
                assert!(w[1].value >= w[0].value - 1e-14);
            }
        }
        // Neumann condition at the inner end.
        assert!(x[0].derivative.abs() < 1e-12);
    }
}

#[test]
fn oracle_agrees_at_n_4000() {
    let gaps: Vec<(f64, f64, f64, f64)> = sweep()
        .into_par_iter()
        .map(|(p, beta, s0)| {
            let params = RobinParams::new(p, beta, s0).unwrap();
            let o = mu1_discrete_oracle(&params, 4000, false).unwrap();
            let m = mu(p, beta, s0);
            (p, beta, s0, (o.value - m).abs() / m.abs())
        })
        .collect();
    for (p, beta, s0, gap) in gaps {
        assert!(gap < 5e-3, "({p}, {beta}, {s0}) relative gap {gap:e}");
    }
}

#[test]
fn constrained_oracle_sits_above_mu1() {
    for (p, beta, s0) in [(2.0, 1.0, 1.0), (3.0, 0.5, 0.25), (1.5, 5.0, 4.0)] {
        let params = RobinParams::new(p, beta, s0).unwrap();
        let o = mu1_discrete_oracle(&params, 400, true).unwrap();
        let m = mu(p, beta, s0);
        assert!(o.value >= m * (1.0 - 1e-3), "({p}, {beta}, {s0}) {} vs {m}", o.value);
        assert!((o.value - m).abs() / m < 2e-2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monotone_in_beta(p in 1.2f64..4.0, b1 in -3.0f64..6.0, b2 in -3.0f64..6.0, s0 in 0.2f64..3.0) {
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        prop_assert!(mu(p, lo, s0) <= mu(p, hi, s0) + 1e-10);
    }

    #[test]
    fn constant_test_function_bound(p in 1.2f64..4.0, beta in 0.01f64..20.0, s0 in 0.1f64..5.0) {
        prop_assert!(mu(p, beta, s0) <= beta / s0 + 1e-10);
    }

    #[test]
    fn sign_matches_beta(p in 1.2f64..4.0, beta in -5.0f64..5.0, s0 in 0.1f64..5.0) {
        let m = mu(p, beta, s0);
        prop_assert_eq!(m.signum(), if beta == 0.0 { m.signum() } else { beta.signum() });
    }
}
