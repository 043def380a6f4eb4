//! Deterministic low-discrepancy sampling.

/// Radical inverse of `index` in `base` (van der Corput sequence).
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv_base = 1.0 / base as f64;
    let mut scale = inv_base;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * scale;
        index /= base;
        scale *= inv_base;
    }
    value
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Halton points in `[0, 1)^D`, starting at index 1 to skip the origin.
#[derive(Debug, Clone)]
pub struct Halton<const D: usize> {
    next: u64,
}

impl<const D: usize> Halton<D> {
    pub fn new() -> Self {
        assert!(D <= PRIMES.len(), "Halton dimension limited to {}", PRIMES.len());
        Self { next: 1 }
    }
}

impl<const D: usize> Default for Halton<D> {
    fn default() -> Self {
        Self::new()
    }
}

impl<const D: usize> Iterator for Halton<D> {
    type Item = [f64; D];

    fn next(&mut self) -> Option<[f64; D]> {
        let i = self.next;
        self.next += 1;
        Some(std::array::from_fn(|d| radical_inverse(i, PRIMES[d])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_base_two() {
        let v: Vec<f64> = (1..8).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]);
    }

    #[test]
    fn halton_stays_in_unit_cube() {
        for p in Halton::<4>::new().take(5000) {
            assert!(p.iter().all(|&x| (0.0..1.0).contains(&x)));
        }
    }
}
