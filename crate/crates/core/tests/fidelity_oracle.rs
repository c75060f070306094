//! Double-double Jacobi oracle for the Uhlmann fidelity of small Dicke-basis states.

use acfreq_core::phase_model::{PhaseDistribution, Theta};
use acfreq_core::probe_states::{dicke_superposition_state, SymmetricDensity};
use acfreq_core::qfi_engine::{fidelity, infidelity};
use twofloat::TwoFloat;

type Mat = Vec<Vec<TwoFloat>>;

fn tf(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// 1/b to double-double accuracy by two Newton steps from the f64 reciprocal.
fn recip(b: TwoFloat) -> TwoFloat {
    let r = tf(1.0 / f64::from(b));
    let r = r + r * (tf(1.0) - b * r);
    r + r * (tf(1.0) - b * r)
}

fn zeros(n: usize) -> Mat {
    vec![vec![tf(0.0); n]; n]
}

fn identity(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = tf(1.0);
    }
    m
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = tf(0.0);
            for k in 0..n {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Cyclic Jacobi diagonalisation of a symmetric matrix: returns (eigenvalues, eigenvectors as columns).
fn jacobi(mut a: Mat) -> (Vec<TwoFloat>, Mat) {
    let n = a.len();
    let mut v = identity(n);
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| f64::from(a[i][j]).abs())
            .fold(0.0, f64::max);
        if off < 1e-36 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let scale = f64::from(a[p][p]).abs() + f64::from(a[q][q]).abs();
                if f64::from(a[p][q]).abs() <= 1e-40 * scale {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) * recip(tf(2.0) * a[p][q]);
                let sign = if theta < 0.0 { tf(-1.0) } else { tf(1.0) };
                let t = sign * recip(theta.abs() + (theta * theta + tf(1.0)).sqrt());
                let c = recip((t * t + tf(1.0)).sqrt());
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (row_p, row_q) = (a[p].clone(), a[q].clone());
                for (k, (apk, aqk)) in row_p.into_iter().zip(row_q).enumerate() {
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn sqrt_psd(a: &Mat) -> Mat {
    let (vals, vecs) = jacobi(a.clone());
    let n = a.len();
    let mut d = zeros(n);
    for i in 0..n {
        d[i][i] = if vals[i] > 0.0 { vals[i].sqrt() } else { tf(0.0) };
    }
    matmul(&matmul(&vecs, &d), &transpose(&vecs))
}

fn oracle_fidelity(a: &SymmetricDensity, b: &SymmetricDensity) -> TwoFloat {
    let load = |s: &SymmetricDensity| -> Mat {
        let m = s.entries();
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| tf(m[(i, j)])).collect()).collect()
    };
    let product = matmul(&sqrt_psd(&load(a)), &sqrt_psd(&load(b)));
    let gram = matmul(&transpose(&product), &product);
    let (vals, _) = jacobi(gram);
    vals.into_iter()
        .filter(|&x| x > 0.0)
        .fold(tf(0.0), |acc, x| acc + x.sqrt())
}

fn dicke(n: usize, variance: f64) -> SymmetricDensity {
    let law = PhaseDistribution::new(variance, 1.0, Theta::Omega).unwrap();
    dicke_superposition_state(n, &law).unwrap()
}

#[test]
fn three_level_dicke_fidelity_matches_double_double_oracle() {
    let a = dicke(2, 0.1);
    let b = dicke(2, 0.11);
    let want = oracle_fidelity(&a, &b);
    let got = fidelity(&a, &b).unwrap();
    assert!((got - f64::from(want)).abs() < 1e-14, "{got} vs {}", f64::from(want));
    let want_inf = f64::from(tf(1.0) - want);
    let got_inf = infidelity(&a, &b).unwrap();
    assert!((got_inf - want_inf).abs() < 1e-14, "{got_inf} vs {want_inf}");
}

#[test]
fn larger_dicke_fidelity_matches_double_double_oracle() {
    for (n, v1, v2) in [(3, 0.05, 0.06), (5, 0.2, 0.25), (8, 0.01, 0.012)] {
        let a = dicke(n, v1);
        let b = dicke(n, v2);
        let want = f64::from(oracle_fidelity(&a, &b));
        let got = fidelity(&a, &b).unwrap();
        assert!((got - want).abs() < 1e-13, "n={n}: {got} vs {want}");
    }
}

#[test]
fn oracle_self_fidelity_is_the_trace() {
    let a = dicke(4, 0.3);
    let f = oracle_fidelity(&a, &a);
    let trace = (0..a.dim()).fold(tf(0.0), |acc, i| acc + tf(a.entries()[(i, i)]));
    assert!(f64::from(f - trace).abs() < 1e-26, "{:e}", f64::from(f - trace));
}
