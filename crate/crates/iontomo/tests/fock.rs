mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use common::{coherent_amplitudes, max_abs_diff, rng};
use iontomo::fock::{
    annihilation, coherent_state, creation, displacement, fock_state, herm_exp, number,
    partial_trace_atom, quadrature, sigma_z, tensor, IonState, Operator, Space,
};

#[test]
fn commutator_is_identity_off_the_edge() {
    let n = 24;
    let a = annihilation(n).unwrap();
    let adag = creation(n).unwrap();
    let comm = a.matrix() * adag.matrix() - adag.matrix() * a.matrix();
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j && i < n - 1 {
                C64::new(1.0, 0.0)
            } else if i == j {
                // truncation confines the deviation to the corner entry
                C64::new(1.0 - n as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            assert!(
                (comm[(i, j)] - expect).norm() < 1e-12,
                "commutator wrong at ({i}, {j}): {}",
                comm[(i, j)]
            );
        }
    }
}

#[test]
fn quadrature_limits() {
    let n = 12;
    let a = annihilation(n).unwrap();
    let adag = creation(n).unwrap();

    let x0 = quadrature(n, 0.0).unwrap();
    let expect = a.matrix() + adag.matrix();
    assert!(max_abs_diff(x0.matrix(), &expect) < 1e-15);

    // θ = π/2: −i(â − â†)
    let xq = quadrature(n, std::f64::consts::FRAC_PI_2).unwrap();
    let expect = (a.matrix() - adag.matrix()) * C64::new(0.0, -1.0);
    assert!(max_abs_diff(xq.matrix(), &expect) < 1e-15);

    assert!(quadrature(n, 0.7).unwrap().hermitian_deviation() < 1e-12);
}

#[test]
fn displacement_examples() {
    // D(0) = I
    let d0 = displacement(16, C64::new(0.0, 0.0)).unwrap();
    let eye = DMatrix::identity(16, 16);
    assert!(max_abs_diff(d0.matrix(), &eye) < 1e-13);

    // D(α)|0⟩ matches the analytic coherent amplitudes
    let n = 32;
    let alpha = C64::new(0.5, 0.0);
    let d = displacement(n, alpha).unwrap();
    let mut vac = DVector::<C64>::zeros(n);
    vac[0] = C64::new(1.0, 0.0);
    let displaced = d.matrix() * vac;
    let oracle = coherent_amplitudes(n, alpha);
    let dev = (&displaced - &oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(dev < 1e-10, "displaced vacuum off by {dev}");

    // D(α)D(−α) = I
    let n = 48;
    let alpha = C64::new(0.5, 0.3);
    let d = displacement(n, alpha).unwrap();
    let dm = displacement(n, -alpha).unwrap();
    let prod = d.matrix() * dm.matrix();
    let eye = DMatrix::identity(n, n);
    assert!(max_abs_diff(&prod, &eye) < 1e-9);
}

#[test]
fn coherent_state_examples() {
    let (c, _) = coherent_state(32, C64::new(1.0, 0.0)).unwrap();
    let c0 = c.pure_vector().unwrap()[0];
    assert!((c0.re - (-0.5f64).exp()).abs() < 1e-10);
    assert!(c0.im.abs() < 1e-15);

    // ⟨n̂⟩ = |α|²
    let alpha = C64::new(1.2, 0.0);
    let (c, rep) = coherent_state(64, alpha).unwrap();
    let n_op = number(64).unwrap();
    let mean_n = c.expectation(&n_op).unwrap().re;
    assert!((mean_n - alpha.norm_sqr()).abs() < 1e-8, "mean n = {mean_n}");
    assert!(!rep.leakage_flag);
}

#[test]
fn herm_exp_unitarity_on_random_hermitian() {
    let mut r = rng(11);
    let n = 16;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let z = if i == j {
                C64::new(r.gen::<f64>() - 0.5, 0.0)
            } else {
                C64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5)
            };
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let op = Operator::hermitian(Space::Vibrational(n), m).unwrap();
    let e_plus = herm_exp(&op, C64::i()).unwrap();
    let e_minus = herm_exp(&op, -C64::i()).unwrap();
    let prod = e_plus.matrix() * e_minus.matrix();
    let eye = DMatrix::identity(n, n);
    assert!(max_abs_diff(&prod, &eye) < 1e-11);
    assert!(e_plus.unitary_deviation() < 1e-11);
}

#[test]
fn herm_exp_spectral_correctness() {
    // exp(sM) must carry the eigenvalues e^{sλ}; check with real s through
    // an independent eigendecomposition of the result.
    let mut r = rng(12);
    let n = 12;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let z = if i == j {
                C64::new(r.gen::<f64>() - 0.5, 0.0)
            } else {
                C64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5)
            };
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let op = Operator::hermitian(Space::Vibrational(n), m.clone()).unwrap();
    let s = 0.37;
    let e = herm_exp(&op, C64::new(s, 0.0)).unwrap();

    let mut lam_in: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    let mut lam_out: Vec<f64> =
        e.matrix().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    lam_in.sort_by(f64::total_cmp);
    lam_out.sort_by(f64::total_cmp);
    for (li, lo) in lam_in.iter().zip(&lam_out) {
        assert!(((s * li).exp() - lo).abs() < 1e-10, "spectrum mismatch: {li} -> {lo}");
    }
}

#[test]
fn tensor_examples() {
    let n = 6;
    let id = tensor(
        &iontomo::fock::atom_identity(),
        &Operator::identity(Space::Vibrational(n)),
    )
    .unwrap();
    let eye = DMatrix::identity(2 * n, 2 * n);
    assert!(max_abs_diff(id.matrix(), &eye) < 1e-15);

    // mixed-product property: (σ_z ⊗ I)(I ⊗ n̂) = σ_z ⊗ n̂
    let nb = number(n).unwrap();
    let lhs = tensor(&sigma_z(), &Operator::identity(Space::Vibrational(n))).unwrap();
    let rhs = tensor(&iontomo::fock::atom_identity(), &nb).unwrap();
    let prod = lhs.matrix() * rhs.matrix();
    let direct = tensor(&sigma_z(), &nb).unwrap();
    assert!(max_abs_diff(&prod, direct.matrix()) < 1e-14);

    // Tr(A ⊗ B) = Tr A · Tr B on random matrices
    let mut r = rng(13);
    let mut a = DMatrix::<C64>::zeros(2, 2);
    let mut b = DMatrix::<C64>::zeros(n, n);
    for i in 0..2 {
        for j in 0..2 {
            a[(i, j)] = C64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5);
        }
    }
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] = C64::new(r.gen::<f64>() - 0.5, r.gen::<f64>() - 0.5);
        }
    }
    let a_op = Operator::new(Space::Atom, a.clone()).unwrap();
    let b_op = Operator::new(Space::Vibrational(n), b.clone()).unwrap();
    let t = tensor(&a_op, &b_op).unwrap();
    assert!((t.matrix().trace() - a.trace() * b.trace()).norm() < 1e-12);
}

#[test]
fn partial_trace_examples() {
    let n = 8;
    // product state: ρ_atom ⊗ ρ_vib reduces to ρ_vib
    let mut r = rng(14);
    let vib = common::random_density(n, 5, 3, &mut r);
    let atom = DMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::new(0.3, 0.0),
        C64::new(0.7, 0.0),
    ]));
    let composite = atom.kronecker(&vib.to_density());
    let state = IonState::density(Space::Composite(n), composite).unwrap();
    let reduced = partial_trace_atom(&state).unwrap();
    assert!(max_abs_diff(&reduced.to_density(), &vib.to_density()) < 1e-12);
    assert!((reduced.to_density().trace().re - 1.0).abs() < 1e-12);

    // (|g⟩|0⟩ + |e⟩|1⟩)/√2 reduces to diag(1/2, 1/2) on the {|0⟩, |1⟩} block
    let mut v = DVector::<C64>::zeros(2 * n);
    v[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[n + 1] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bell = IonState::pure(Space::Composite(n), v).unwrap();
    let reduced = partial_trace_atom(&bell).unwrap();
    let rho = reduced.to_density();
    assert!((rho[(0, 0)].re - 0.5).abs() < 1e-14);
    assert!((rho[(1, 1)].re - 0.5).abs() < 1e-14);
    assert!(rho[(0, 1)].norm() < 1e-14);
}

#[test]
fn partial_trace_is_linear_and_trace_preserving() {
    let n = 10;
    let mut r = rng(15);
    for _ in 0..6 {
        let a = common::random_density(2 * n, 2 * n, 4, &mut r).to_density();
        let b = common::random_density(2 * n, 2 * n, 4, &mut r).to_density();
        let w: f64 = r.gen_range(0.1..0.9);
        let mixed = &a * C64::new(w, 0.0) + &b * C64::new(1.0 - w, 0.0);

        let reduce = |m: &DMatrix<C64>| {
            let s = IonState::density(Space::Composite(n), m.clone()).unwrap();
            partial_trace_atom(&s).unwrap().to_density()
        };
        let lhs = reduce(&mixed);
        let rhs = reduce(&a) * C64::new(w, 0.0) + reduce(&b) * C64::new(1.0 - w, 0.0);
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        assert!((lhs.trace().re - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // D(α)D(β) = e^{i·Im(αβ*)} D(α+β) in the well-truncated regime. The
    // identity is an infinite-space statement: entries within reach of the
    // truncation edge (the displaced support of the top levels) deviate at
    // O(1), so the assertion covers the block below that band.
    #[test]
    fn displacement_composition(
        ar in -0.5f64..0.5, ai in -0.5f64..0.5,
        br in -0.5f64..0.5, bi in -0.5f64..0.5,
    ) {
        let n = 32;
        let alpha = C64::new(ar, ai);
        let beta = C64::new(br, bi);
        let total = alpha.norm() + beta.norm();
        prop_assume!(total <= (n as f64).sqrt() / 4.0);

        let da = displacement(n, alpha).unwrap();
        let db = displacement(n, beta).unwrap();
        let dab = displacement(n, alpha + beta).unwrap();
        let phase = C64::from_polar(1.0, (alpha * beta.conj()).im);
        let lhs = da.matrix() * db.matrix();
        let rhs = dab.matrix() * phase;

        let edge = (total * (n as f64).sqrt()).ceil() as usize + 8;
        let keep = n - edge.min(n / 2);
        let mut dev: f64 = 0.0;
        for i in 0..keep {
            for j in 0..keep {
                dev = dev.max((lhs[(i, j)] - rhs[(i, j)]).norm());
            }
        }
        prop_assert!(dev < 1e-8, "bulk deviation {dev} (keep {keep})");
    }

    // coherent states stay normalized with a quiet truncation report
    #[test]
    fn coherent_normalization(ar in -1.2f64..1.2, ai in -1.2f64..1.2) {
        let (state, rep) = coherent_state(64, C64::new(ar, ai)).unwrap();
        let norm = state.pure_vector().unwrap().norm();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        prop_assert!(!rep.leakage_flag);
    }
}

#[test]
fn fock_state_bounds() {
    assert!(fock_state(8, 7).is_ok());
    assert!(fock_state(8, 8).is_err());
}
