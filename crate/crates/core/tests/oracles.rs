mod common;

use common::*;
use pdopt_core::linalg::{cholesky, gen_eig_max, sym_eigs, weighted_norm_sq};
use pdopt_core::operators::*;
use pdopt_core::rng::{seeded, uniform};
use pdopt_core::{DenseMatrix, DenseVector};
use proptest::prelude::*;

fn smooth_catalog(seed: u64) -> Vec<(&'static str, Box<dyn SmoothOracle>)> {
    let mut rng = seeded(seed);
    let n = 4;
    vec![
        ("zero", Box::new(ZeroSmooth::new(n))),
        ("linear", Box::new(linear_oracle(random_vector(&mut rng, n, -2.0, 2.0)))),
        (
            "quadratic",
            Box::new(quadratic_oracle(random_matrix(&mut rng, 6, n), random_vector(&mut rng, 6, -1.0, 1.0)).unwrap()),
        ),
        (
            "scaled_distance",
            Box::new(ScaledDistance::new(2.5, random_vector(&mut rng, n, -1.0, 1.0)).unwrap()),
        ),
    ]
}

fn prox_catalog() -> Vec<(&'static str, Box<dyn ProxOracle>)> {
    vec![
        ("zero", Box::new(ZeroProx::new(1))),
        ("l1", Box::new(L1Norm::new(1, 0.7))),
        ("box", Box::new(BoxIndicator::new(vec![-0.5].into(), vec![1.5].into()).unwrap())),
        ("squared_norm", Box::new(SquaredNorm::new(1, 3.0).unwrap())),
        ("indicator_zero", Box::new(IndicatorZero::new(1))),
    ]
}

#[test]
fn gradients_match_central_differences() {
    let h = 1e-5;
    for (name, f) in smooth_catalog(11) {
        let mut rng = seeded(12);
        for _ in 0..20 {
            let x = random_vector(&mut rng, f.dim(), -3.0, 3.0);
            let g = f.gradient(&x);
            let mut fd = DenseVector::zeros(x.len());
            for i in 0..x.len() {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[i] += h;
                xm[i] -= h;
                fd[i] = (f.value(&xp).unwrap() - f.value(&xm).unwrap()) / (2.0 * h);
            }
            let err = fd.sub(&g).norm() / g.norm().max(1.0);
            assert!(err <= 1e-6, "{name}: {err}");
        }
    }
}

#[test]
fn prox_beats_grid_search() {
    let mut rng = seeded(21);
    for (name, h) in prox_catalog() {
        for _ in 0..20 {
            let t = uniform(&mut rng, -3.0, 3.0);
            let sigma = uniform(&mut rng, 0.1, 3.0);
            let u = h.prox(&[t], sigma)[0];
            let obj = |w: f64| h.value(&[w]).unwrap() + (w - t) * (w - t) / (2.0 * sigma);
            let best = (0..10_000)
                .map(|i| obj(-6.0 + 12.0 * i as f64 / 9_999.0))
                .fold(f64::INFINITY, f64::min);
            let best = best.min(obj(0.0));
            assert!(obj(u) <= best + 1e-12, "{name}: prox {} grid {}", obj(u), best);
        }
    }
}

#[test]
fn prox_beats_random_competitors() {
    let mut rng = seeded(22);
    let n = 5;
    let cat: Vec<Box<dyn ProxOracle>> = vec![
        Box::new(L1Norm::new(n, 0.4)),
        Box::new(BoxIndicator::symmetric(n, 0.8).unwrap()),
        Box::new(SquaredNorm::new(n, 0.5).unwrap()),
    ];
    for h in &cat {
        let t = random_vector(&mut rng, n, -2.0, 2.0);
        let sigma = 0.7;
        let u = h.prox(&t, sigma);
        let obj = |w: &[f64]| {
            let d = DenseVector::from(w).sub(&t);
            h.value(w).unwrap() + d.dot(&d) / (2.0 * sigma)
        };
        for _ in 0..100 {
            let w = random_vector(&mut rng, n, -2.0, 2.0);
            assert!(obj(&u) <= obj(&w) + 1e-12);
        }
    }
}

#[test]
fn moreau_recomposition_against_closed_forms() {
    let mut rng = seeded(31);
    for _ in 0..50 {
        let t = random_vector(&mut rng, 3, -3.0, 3.0);
        let sigma = uniform(&mut rng, 0.2, 4.0);
        let weight = 0.6;
        // (w‖·‖₁)* is the indicator of [−w, w]ⁿ: its prox is a clamp.
        let l1 = L1Norm::new(3, weight);
        let scaled: DenseVector = t.iter().map(|v| v / sigma).collect();
        let dual = prox_conjugate(&l1, &scaled, 1.0 / sigma).unwrap();
        let clamp: DenseVector = scaled.iter().map(|v| v.clamp(-weight, weight)).collect();
        assert!(dual.sub(&clamp).norm() < 1e-12);
        let back = l1.prox(&t, sigma).add(&dual.scaled(sigma));
        assert!(back.sub(&t).norm() < 1e-10);
        // ((c/2)‖·‖²)* = ‖·‖²/(2c)
        let sq = SquaredNorm::new(3, 2.0).unwrap();
        let dual = prox_conjugate(&sq, &t, sigma).unwrap();
        let closed = t.scaled(1.0 / (1.0 + sigma / 2.0));
        assert!(dual.sub(&closed).norm() < 1e-12);
    }
}

#[test]
fn catalog_assumptions_hold() {
    for (name, f) in smooth_catalog(41) {
        assert!(validate_smooth(f.as_ref(), 50, 42).holds(1e-9), "{name}");
    }
    for (name, h) in prox_catalog() {
        assert!(validate_prox(h.as_ref(), 50, 43).holds(1e-9), "{name}");
    }
}

#[test]
fn adjoint_consistency() {
    let mut rng = seeded(51);
    for (r, c) in [(1, 1), (3, 5), (6, 2), (7, 7)] {
        let a = LinearOperator::new(random_matrix(&mut rng, r, c));
        assert!(a.adjoint_defect(20, 52) < 1e-14);
    }
}

/// Characteristic polynomial coefficients (monic, highest first) by
/// Faddeev–LeVerrier.
fn char_poly(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = vec![1.0];
    let mut m = DenseMatrix::zeros(n, n);
    for k in 1..=n {
        let prev = *coeffs.last().unwrap();
        m = a.matmul(&m).unwrap().add_scaled(prev, &DenseMatrix::identity(n)).unwrap();
        let am = a.matmul(&m).unwrap();
        let trace: f64 = (0..n).map(|i| am[(i, i)]).sum();
        coeffs.push(-trace / k as f64);
    }
    coeffs
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().fold(0.0, |acc, v| acc * x + v)
}

/// Real roots of a polynomial with only real roots, by sign changes on a fine
/// grid followed by bisection.
fn bracket_roots(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let steps = 200_000;
    let mut roots = Vec::new();
    let xs: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (horner(c, a), horner(c, b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if horner(c, a) * horner(c, m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

#[test]
fn eigenvalues_match_characteristic_roots() {
    let mut rng = seeded(61);
    for n in 2..=6 {
        for _ in 0..5 {
            let b = random_matrix(&mut rng, n, n);
            let s = b.add(&b.transpose()).unwrap().scaled(0.5);
            let eig = sym_eigs(&s).unwrap().eigenvalues;
            let radius = (0..n).map(|i| s.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
            let roots = bracket_roots(&char_poly(&s), -radius - 1e-3, radius + 1e-3 + 1e-7);
            assert_eq!(roots.len(), n, "n={n}: {roots:?} vs {eig:?}");
            for (r, e) in roots.iter().zip(&eig) {
                assert!((r - e).abs() <= 1e-8, "{r} vs {e}");
            }
        }
    }
}

fn spd_strategy() -> impl Strategy<Value = DenseMatrix> {
    (1usize..7).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |data| {
            let b = DenseMatrix::from_row_major(n, n, data).unwrap();
            b.matmul(&b.transpose())
                .unwrap()
                .add_scaled(0.1, &DenseMatrix::identity(n))
                .unwrap()
        })
    })
}

proptest! {
    #[test]
    fn cholesky_round_trip(s in spd_strategy()) {
        let l = cholesky(&s).unwrap();
        let back = l.matmul(&l.transpose()).unwrap();
        prop_assert!(back.sub(&s).unwrap().frobenius_norm() <= 1e-10 * s.frobenius_norm());
    }

    #[test]
    fn generalized_eigenvalue_of_self_is_one(s in spd_strategy()) {
        prop_assert!((gen_eig_max(&s, &s).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn weighted_norm_splits_over_sums(a in spd_strategy(), seed in any::<u64>()) {
        let n = a.rows();
        let mut rng = seeded(seed);
        let b = random_matrix(&mut rng, n, n);
        let v = random_vector(&mut rng, n, -1.0, 1.0);
        let sum = a.add(&b).unwrap();
        let lhs = weighted_norm_sq(&v, &sum).unwrap();
        let rhs = weighted_norm_sq(&v, &a).unwrap() + weighted_norm_sq(&v, &b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn soft_threshold_is_prox_l1(t in prop::collection::vec(-5.0f64..5.0, 1..8), sigma in 0.01f64..4.0) {
        let u = prox_l1(&t, sigma).unwrap();
        let l1 = L1Norm::new(t.len(), 1.0);
        prop_assert_eq!(u, l1.prox(&t, sigma));
    }
}
