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

use super::operator::{DensityMatrix, HermitianOp};
use crate::error::{numeric, Result};

/// Lüders update for the outcome `P` of a projective measurement: returns
/// `tr(P rho P)` and the unnormalized branch `P rho P`.
pub fn lueders_update(rho: &DensityMatrix, p: &HermitianOp) -> Result<(f64, DensityMatrix)> {
    if p.dim() != rho.dim() {
        return numeric(format!(
            "projector dimension {} does not match state dimension {}",
            p.dim(),
            rho.dim()
        ));
    }
    let defect = p.idempotence_defect();
    if defect > super::STRUCT_TOL {
        return numeric(format!("measurement operator is not a projector (defect {defect:.3e})"));
    }
    let post = p.matrix() * rho.matrix() * p.matrix();
    let prob = super::linalg::trace(&post).re.max(0.0);
    Ok((prob, DensityMatrix::with_mass(post, prob)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::linalg::{c, max_abs_diff, CMatrix, ONE, ZERO};
    use crate::qmath::StateVector;

    #[test]
    fn identity_keeps_state() {
        let rho = crate::qmath::haar_state(3, 2).density();
        let id = HermitianOp::new(CMatrix::identity(3, 3)).unwrap();
        let (p, post) = lueders_update(&rho, &id).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(max_abs_diff(post.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn zero_projector_on_plus() {
        let s = 1.0 / 2f64.sqrt();
        let plus = StateVector::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap().density();
        let p0 = HermitianOp::new(CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])).unwrap();
        let (p, post) = lueders_update(&plus, &p0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((post.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!(post.is_subnormalized());
        let (p2, post2) = lueders_update(&post, &p0).unwrap();
        assert!((p2 - p).abs() < 1e-12);
        assert!(max_abs_diff(post.matrix(), post2.matrix()) < 1e-15);
    }

    #[test]
    fn non_projector_rejected() {
        let rho = crate::qmath::haar_state(2, 2).density();
        let half = HermitianOp::new(CMatrix::identity(2, 2) * c(0.5, 0.0)).unwrap();
        assert!(lueders_update(&rho, &half).is_err());
    }
}
