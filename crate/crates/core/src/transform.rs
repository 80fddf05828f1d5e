//! In-place fast Walsh–Hadamard transform (FWHT) kernels.
//!
//! The transform expands a function over bitstrings in parity characters,
//! `W{f}(y) = Σ_x f(x)·(−1)^{x·y}` with `x·y = Σ_i x_i y_i` over bits. It is
//! self-inverse up to the factor 2^N: `W{W{f}} = 2^N·f`. Index bit `i`
//! corresponds to qubit `i` everywhere in this crate (little-endian).
//!
//! The kernels run radix-2 butterfly passes over XOR structure, O(N·2^N)
//! total, and accept both real (`f64`) and complex (`Complex64`) data.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Number of qubits encoded by a vector of length `len`, i.e. log2(len).
///
/// Fails unless `len` is a power of two (`len == 1` means zero qubits).
pub fn n_qubits_of_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    Ok(len.trailing_zeros() as usize)
}

/// In-place forward transform; `data.len()` must be a power of two.
///
/// After the call, `data[y] = Σ_x old[x]·(−1)^{x·y}`.
pub fn fwht_in_place<T>(data: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    n_qubits_of_len(data.len())?;
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let x = *a;
                let y = *b;
                *a = x + y;
                *b = x - y;
            }
        }
        h <<= 1;
    }
    Ok(())
}

/// In-place inverse transform: forward passes followed by the 1/2^N scale.
pub fn fwht_inverse_in_place<T>(data: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    fwht_in_place(data)?;
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v = *v * scale;
    }
    Ok(())
}

/// Out-of-place forward transform.
pub fn fwht<T>(v: &[T]) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// Out-of-place inverse transform, `(1/2^N)·W{v}`.
pub fn fwht_inverse<T>(v: &[T]) -> Result<Vec<T>>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let mut out = v.to_vec();
    fwht_inverse_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// O(4^N) direct summation, the oracle the butterflies are checked against.
    fn direct_walsh(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        (0..n)
            .map(|y| {
                v.iter()
                    .enumerate()
                    .map(|(x, &f)| if (x & y).count_ones() % 2 == 0 { f } else { -f })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(
            fwht(&[1.0, 2.0, 3.0]),
            Err(Error::NotPowerOfTwo { len: 3 })
        ));
        assert!(matches!(fwht::<f64>(&[]), Err(Error::NotPowerOfTwo { len: 0 })));
    }

    #[test]
    fn delta_transforms_to_all_ones() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        assert_eq!(fwht(&v).unwrap(), vec![1.0; 8]);
    }

    #[test]
    fn all_ones_transforms_to_scaled_delta() {
        let got = fwht(&vec![1.0; 8]).unwrap();
        assert_eq!(got, vec![8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn small_vector_matches_direct_sum() {
        // Frozen from the direct O(4^N) oracle.
        let got = fwht(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(got, vec![10.0, -2.0, -4.0, 0.0]);
        assert_eq!(got, direct_walsh(&[1.0, 2.0, 3.0, 4.0]));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(fwht_inverse(&[1.0, 1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(fwht_inverse(&[10.0, -2.0, -4.0, 0.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn complex_roundtrip() {
        let v: Vec<Complex64> = (0..16)
            .map(|k| Complex64::new(k as f64 * 0.3 - 1.0, (k * k % 7) as f64))
            .collect();
        let back = fwht_inverse(&fwht(&v).unwrap()).unwrap();
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
