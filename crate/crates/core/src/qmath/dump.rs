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

//! Binary matrix dumps.
//!
//! Layout: the magic bytes `CHRS`, a little-endian `u32` version (1), a
//! little-endian `u64` dimension, then `dim * dim` row-major entries, each a
//! pair of little-endian `f64` (real, imaginary).

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::linalg::CMatrix;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CHRS";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 16;

pub fn encode(m: &CMatrix) -> Vec<u8> {
    assert!(m.is_square(), "only square matrices can be dumped");
    let n = m.nrows();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * n * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<CMatrix> {
    if bytes.len() < HEADER_LEN || &bytes[0..4] != MAGIC {
        return Err(Error::Io("not a CHRS matrix dump".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Io(format!("unsupported dump version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let expected = n
        .checked_mul(n)
        .and_then(|e| e.checked_mul(16))
        .and_then(|e| e.checked_add(HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(Error::Io(format!("dump length {} does not match dimension {n}", bytes.len())));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let k = HEADER_LEN + 16 * (i * n + j);
        Complex64::new(f(k), f(k + 8))
    }))
}

pub fn write_dump(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode(m))?;
    Ok(())
}

pub fn read_dump(path: impl AsRef<Path>) -> Result<CMatrix> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}
