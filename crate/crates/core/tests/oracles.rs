//! Independent reference computations checked against the library.

use std::f64::consts::PI;
use std::sync::Arc;

use dqpt::dynamics::{
    evolve_spectral, expm_propagate, initial_state, lindblad_evolve, overlap_coefficients, propagate, time_grid,
    DensityMatrix, Method, PropagatorConfig,
};
use dqpt::model::{build_hamiltonian, dense_eigensystem, ModelParams};
use dqpt::observables::{qfi_mixed_with_spectrum, qfi_pure, rate_function};
use dqpt::spin::{build_basis, BlochDirection, Parity, Sector, SparseOperator, SpinBasis, StateVector};
use dqpt::Complex64;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn full(n: usize) -> Arc<SpinBasis> {
    Arc::new(build_basis(n, Sector::Full).unwrap())
}

fn sector(n: usize) -> Arc<SpinBasis> {
    Arc::new(build_basis(n, dqpt::dynamics::initial_sector(n)).unwrap())
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Dense real Hamiltonian built from Kronecker products of 2x2 Pauli
/// matrices, with site 0 as the least significant bit and `|0> = up`.
fn kron_hamiltonian(n: usize, j: f64, jp: f64, h: f64) -> DMatrix<f64> {
    let dim = 1usize << n;
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let id = DMatrix::<f64>::identity(2, 2);
    let site_op = |ops: &[(usize, &DMatrix<f64>)]| {
        let mut m = DMatrix::<f64>::identity(1, 1);
        for site in (0..n).rev() {
            let mut factor = id.clone();
            for (s, op) in ops {
                if *s == site {
                    factor = &factor * *op;
                }
            }
            m = m.kronecker(&factor);
        }
        m
    };
    let mut hm = DMatrix::<f64>::zeros(dim, dim);
    for l in 0..n {
        hm -= site_op(&[(l, &sz), ((l + 1) % n, &sz)]) * j;
        if jp != 0.0 {
            hm -= site_op(&[(l, &sz), ((l + 2) % n, &sz)]) * jp;
        }
        hm += site_op(&[(l, &sx)]) * h;
    }
    hm
}

#[test]
fn two_site_spectrum_by_hand() {
    // The single bond of a two-site ring is counted twice: -2 sz sz.
    let b = full(2);
    let h = build_hamiltonian(&ModelParams::new(2, 1.0, 0.0, 0.0).unwrap(), &b).unwrap();
    let eig = dense_eigensystem(&h).unwrap();
    let want = [-2.0, -2.0, 2.0, 2.0];
    for (e, w) in eig.energies.iter().zip(want) {
        assert!((e - w).abs() < 1e-14);
    }
    let up = StateVector::basis_state(b.clone(), 0).unwrap();
    let hv = dqpt::spin::apply(&h, &up).unwrap();
    assert!((hv.amplitudes()[0] - c(-2.0)).norm() < 1e-15);
    assert!(hv.amplitudes()[1..].iter().all(|z| z.norm() < 1e-15));
}

#[test]
fn dense_matrix_matches_kronecker_construction() {
    for (n, jp) in [(5usize, 0.0), (6, 0.7)] {
        let h = build_hamiltonian(&ModelParams::new(n, 1.0, jp, 0.9).unwrap(), &full(n)).unwrap();
        let dense = h.to_dense();
        let oracle = kron_hamiltonian(n, 1.0, jp, 0.9);
        for i in 0..dense.nrows() {
            for j in 0..dense.ncols() {
                assert!((dense[[i, j]] - c(oracle[(i, j)])).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn critical_ground_energy_n8() {
    // Free-fermion value for J = h = 1 on a ring of 8 with antiperiodic modes.
    let free_fermion: f64 = -2.0 * (0..8).map(|m| (PI * (2 * m + 1) as f64 / 16.0).sin().abs()).sum::<f64>();
    const FROZEN: f64 = -10.251661790966;
    assert!((free_fermion - FROZEN).abs() < 1e-11);

    let oracle = SymmetricEigen::new(kron_hamiltonian(8, 1.0, 0.0, 1.0));
    let e_dense = oracle.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((e_dense - free_fermion).abs() < 1e-10);

    let p = ModelParams::new(8, 1.0, 0.0, 1.0).unwrap();
    let eig = dense_eigensystem(&build_hamiltonian(&p, &sector(8)).unwrap()).unwrap();
    assert!((eig.energies[0] - e_dense).abs() < 1e-10);
    let eig_full = dense_eigensystem(&build_hamiltonian(&p, &full(8)).unwrap()).unwrap();
    assert!((eig_full.energies[0] - e_dense).abs() < 1e-10);
}

/// Lowest eigenpair by plain Lanczos with full reorthogonalization and a
/// dense tridiagonal solve.
fn lanczos_ground_state(h: &SparseOperator, steps: usize) -> (f64, Vec<Complex64>) {
    let d = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut v: Vec<Complex64> = (0..d).map(|_| c(rng.gen::<f64>() - 0.5)).collect();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= nrm);
    let mut basis = vec![v];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for k in 0..steps.min(d) {
        let mut w = vec![c(0.0); d];
        h.matvec_into(&basis[k], &mut w);
        let a: f64 = basis[k].iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let proj: Complex64 = q.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                w.iter_mut().zip(q).for_each(|(y, x)| *y -= proj * x);
            }
        }
        let b = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if b < 1e-12 || k + 1 == steps.min(d) {
            break;
        }
        beta.push(b);
        basis.push(w.into_iter().map(|z| z / b).collect());
    }
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    let es = SymmetricEigen::new(t);
    let (idx, e0) = es
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &e)| if e < b.1 { (i, e) } else { b });
    let y = es.eigenvectors.column(idx);
    let mut g = vec![c(0.0); d];
    for (k, q) in basis.iter().take(m).enumerate() {
        g.iter_mut().zip(q).for_each(|(acc, x)| *acc += x * y[k]);
    }
    (e0, g)
}

#[test]
fn ground_state_fidelity_two_solvers() {
    let b = sector(8);
    let h = build_hamiltonian(&ModelParams::new(8, 1.0, 0.0, 1.0).unwrap(), &b).unwrap();
    let psi0 = initial_state(&b).unwrap();
    let eig = dense_eigensystem(&h).unwrap();
    let coeff = overlap_coefficients(&eig, &psi0).unwrap();
    let (e0, g) = lanczos_ground_state(&h, 128);
    assert!((e0 - eig.energies[0]).abs() < 1e-10);
    let fidelity: f64 = g
        .iter()
        .zip(psi0.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr();
    assert!((coeff[0].norm_sqr() - fidelity).abs() < 1e-10);
}

#[test]
fn krylov_spectral_expm_agree() {
    for (n, jp, h) in [(6usize, 0.0, 1.0), (8, 1.0, 2.475), (10, 0.0, 1.0)] {
        let b = sector(n);
        let hm = build_hamiltonian(&ModelParams::new(n, 1.0, jp, h).unwrap(), &b).unwrap();
        let psi0 = initial_state(&b).unwrap();
        let grid = time_grid(8.0, 0.5).unwrap();
        let kry = propagate(&hm, &psi0, &grid, &PropagatorConfig::default()).unwrap();
        let spec = propagate(
            &hm,
            &psi0,
            &grid,
            &PropagatorConfig {
                method: Method::Spectral,
                ..PropagatorConfig::default()
            },
        )
        .unwrap();
        for (k, &t) in grid.iter().enumerate() {
            assert!(distance(&kry[k], &spec[k]) < 1e-8, "N={n} t={t}");
            assert!((kry[k].norm() - 1.0).abs() < 1e-10);
        }
        for &t in &[0.5, 3.0, 8.0] {
            let k = (t / 0.5) as usize;
            let e = expm_propagate(&hm, &psi0, t).unwrap();
            assert!(distance(&e, &kry[k]) < 1e-8, "N={n} t={t} expm");
        }
    }
}

#[test]
fn final_state_n8_matches_spectral() {
    let b = sector(8);
    let hm = build_hamiltonian(&ModelParams::new(8, 1.0, 0.0, 1.0).unwrap(), &b).unwrap();
    let psi0 = initial_state(&b).unwrap();
    let grid = time_grid(8.0, 0.01).unwrap();
    let kry = propagate(&hm, &psi0, &grid, &PropagatorConfig::default()).unwrap();
    let eig = dense_eigensystem(&hm).unwrap();
    let exact = evolve_spectral(&eig, &psi0, 8.0).unwrap();
    assert!(distance(kry.last().unwrap(), &exact) < 1e-8);
}

#[test]
fn random_hermitian_against_dense_exponential() {
    let b = full(6);
    let d = b.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut trip = Vec::new();
    for i in 0..d {
        trip.push((i, i, c(rng.gen::<f64>() * 2.0 - 1.0)));
        for _ in 0..4 {
            let j = rng.gen_range(0..d);
            if j == i {
                continue;
            }
            let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            trip.push((i, j, z));
            trip.push((j, i, z.conj()));
        }
    }
    let h = SparseOperator::from_triplets(b.clone(), &trip, true).unwrap();
    let amps: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
    let nrm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi = StateVector::from_amplitudes(b, amps.into_iter().map(|z| z / nrm).collect()).unwrap();
    let grid = time_grid(2.0, 0.25).unwrap();
    let kry = propagate(&h, &psi, &grid, &PropagatorConfig::default()).unwrap();
    for (k, &t) in grid.iter().enumerate() {
        let e = expm_propagate(&h, &psi, t).unwrap();
        assert!(distance(&e, &kry[k]) < 1e-10, "t={t}");
    }
}

#[test]
fn zero_field_echo_transfer_matrix() {
    // Z(t) = cos^N t + i^N sin^N t for the classical Ising ring.
    for n in [4usize, 6, 7, 10] {
        let b = sector(n);
        let hm = build_hamiltonian(&ModelParams::new(n, 1.0, 0.0, 0.0).unwrap(), &b).unwrap();
        let psi0 = initial_state(&b).unwrap();
        let grid = time_grid(2.0, 0.05).unwrap();
        let states = propagate(&hm, &psi0, &grid, &PropagatorConfig::default()).unwrap();
        for (s, &t) in states.iter().zip(&grid) {
            let i_n = Complex64::new(0.0, 1.0).powu(n as u32);
            let z = c(t.cos().powi(n as i32)) + i_n * t.sin().powi(n as i32);
            let amp = psi0.inner(s).unwrap();
            assert!((amp.norm_sqr() - z.norm_sqr()).abs() < 1e-10, "N={n} t={t}");
            let r = rate_function(&psi0, s, n).unwrap();
            assert!((r.echo - z.norm_sqr()).abs() < 1e-10);
        }
    }
}

#[test]
fn unitary_limit_of_master_equation() {
    for n in [4usize, 8] {
        let b = full(n);
        let hm = build_hamiltonian(&ModelParams::new(n, 1.0, 0.0, 1.0).unwrap(), &b).unwrap();
        let psi0 = initial_state(&b).unwrap();
        let grid = time_grid(2.0, 0.5).unwrap();
        let pure = propagate(&hm, &psi0, &grid, &PropagatorConfig::default()).unwrap();
        let rho0 = DensityMatrix::from_pure(&psi0).unwrap();
        let mixed = lindblad_evolve(&hm, &[], &rho0, &grid, 1e-12).unwrap();
        for (k, &t) in grid.iter().enumerate() {
            let reference = DensityMatrix::from_pure(&pure[k]).unwrap();
            let d = mixed[k].trace_distance(&reference).unwrap();
            assert!(d < 1e-8, "N={n} t={t}: {d:.3e}");
        }
    }
}

#[test]
fn mixed_qfi_of_pure_states() {
    let b = full(6);
    let hm = build_hamiltonian(&ModelParams::new(6, 1.0, 0.5, 1.3).unwrap(), &b).unwrap();
    let psi0 = initial_state(&b).unwrap();
    let grid = time_grid(3.0, 1.0).unwrap();
    let states = propagate(&hm, &psi0, &grid, &PropagatorConfig::default()).unwrap();
    for s in &states {
        let spec = DensityMatrix::from_pure(s).unwrap().spectrum().unwrap();
        for dir in [
            BlochDirection::z(),
            BlochDirection::x(),
            BlochDirection::normalized(0.3, -0.2, 0.9).unwrap(),
        ] {
            let m = qfi_mixed_with_spectrum(&spec, 6, &dir).unwrap().fisher;
            let p = qfi_pure(s, &dir).unwrap().fisher;
            assert!((m - p).abs() < 1e-8);
        }
    }
}

#[test]
fn parity_sectors_of_two_sites() {
    // sx sx on two spins has eigenvalues +1, +1, -1, -1.
    for p in [Parity::Plus, Parity::Minus] {
        assert_eq!(build_basis(2, Sector::Parity(p)).unwrap().dim(), 2);
    }
}

/// Single-site operator on site `site` of an `n`-site chain, bit `l` = site `l`.
fn kron_site(n: usize, site: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut m = DMatrix::<Complex64>::identity(1, 1);
    for s in (0..n).rev() {
        m = m.kronecker(if s == site { op } else { &id });
    }
    m
}

/// `F_Q / N` for the collective `S_z` from an eigen-decomposition of rho.
fn dense_mixed_qfi_density(rho: &DMatrix<Complex64>, n: usize) -> f64 {
    let d = rho.nrows();
    let sz = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            c((0..n).map(|l| if (i >> l) & 1 == 0 { 0.5 } else { -0.5 }).sum())
        } else {
            c(0.0)
        }
    });
    let eig = SymmetricEigen::new(rho.clone());
    let v = &eig.eigenvectors;
    let m = v.adjoint() * sz * v;
    let mut f = 0.0;
    for k in 0..d {
        for l in 0..d {
            let (pk, pl) = (eig.eigenvalues[k].max(0.0), eig.eigenvalues[l].max(0.0));
            if pk + pl > 1e-12 {
                f += 2.0 * (pk - pl).powi(2) / (pk + pl) * m[(k, l)].norm_sqr();
            }
        }
    }
    f / n as f64
}

#[test]
fn open_chain_against_dense_runge_kutta() {
    let n = 4;
    let (gz, gm): (f64, f64) = (0.05, 0.05);
    let hm = kron_hamiltonian(n, 1.0, 0.0, 1.0).map(c);
    let sz = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]);
    // Lowering takes bit 0 (up) to bit 1 (down).
    let lower = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(1.0), c(0.0)]);
    let mut jumps = Vec::new();
    for l in 0..n {
        jumps.push(kron_site(n, l, &sz) * c(gz.sqrt()));
        jumps.push(kron_site(n, l, &lower) * c(gm.sqrt()));
    }
    let i = Complex64::new(0.0, 1.0);
    let rhs = |rho: &DMatrix<Complex64>| {
        let mut out = (&hm * rho - rho * &hm) * (-i);
        for l in &jumps {
            let ld = l.adjoint();
            let ldl = &ld * l;
            out += l * rho * &ld - (&ldl * rho + rho * &ldl) * c(0.5);
        }
        out
    };
    let psi0 = initial_state(&full(n)).unwrap();
    let v = DMatrix::from_column_slice(1 << n, 1, psi0.amplitudes());
    let mut rho = &v * v.adjoint();
    let step = 1e-3;
    let checkpoints = [0.5, 1.0, 2.0, 3.0];
    let mut reference = Vec::new();
    let mut t = 0.0;
    for &stop in &checkpoints {
        while t < stop - 1e-12 {
            let k1 = rhs(&rho);
            let k2 = rhs(&(&rho + &k1 * c(step / 2.0)));
            let k3 = rhs(&(&rho + &k2 * c(step / 2.0)));
            let k4 = rhs(&(&rho + &k3 * c(step)));
            rho += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(step / 6.0);
            t += step;
        }
        reference.push(dense_mixed_qfi_density(&rho, n));
    }
    let opts = dqpt::protocol::OpenOptions {
        t_max: 3.0,
        dt: 0.5,
        ..Default::default()
    };
    let run = dqpt::protocol::run_open(&ModelParams::new(n, 1.0, 0.0, 1.0).unwrap(), gz, gm, &opts).unwrap();
    for (&stop, want) in checkpoints.iter().zip(&reference) {
        let row = run.rows.iter().find(|r| (r.t - stop).abs() < 1e-9).unwrap();
        assert!((row.f_q_z - want).abs() < 1e-8, "t={stop}: {} vs {want}", row.f_q_z);
    }
}
