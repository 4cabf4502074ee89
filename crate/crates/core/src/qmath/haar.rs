// Copyright 2026 The chrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Haar-random states and unitaries.

use nalgebra::QR;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::CMatrix;
use super::seed;
use super::state::StateVector;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(G + G^dagger) / 2` for a complex Gaussian `G` (a GUE sample).
pub fn gaussian_hermitian_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-random pure state drawn from `rng` (normalized complex Gaussian).
pub fn haar_state_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    assert!(dim >= 1, "Haar state needs dim >= 1");
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = StateVector::new(amps) {
            return s;
        }
    }
}

/// Haar-random pure state, deterministic per seed.
pub fn haar_state(dim: usize, seed: u64) -> StateVector {
    haar_state_with(dim, &mut seed::rng(seed))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with the
/// phases of the `R` diagonal moved into `Q`.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    assert!(dim >= 1, "Haar unitary needs dim >= 1");
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary(dim: usize, seed: u64) -> CMatrix {
    haar_unitary_with(dim, &mut seed::rng(seed))
}
