use num_complex::Complex64;

use super::{pairing_set, BathSpec, Pairing};
use crate::error::Result;

impl super::PairingSet {
    /// `sum over pairings of prod over arcs of corr(i, j)`, with point indices
    /// into whatever time list the caller holds.
    pub fn sum_products(
        &self,
        linked_only: bool,
        mut corr: impl FnMut(usize, usize) -> Complex64,
    ) -> Complex64 {
        self.select(linked_only)
            .iter()
            .map(|p: &Pairing| p.arcs().iter().map(|&(a, b)| corr(a, b)).product::<Complex64>())
            .sum()
    }
}

/// Bath influence functional of the ordered times `s`: the Wick sum of `B`
/// over all pairings, or over linked pairings only.
pub fn bath_influence(s: &[f64], bath: &BathSpec, linked_only: bool) -> Result<Complex64> {
    let set = pairing_set(s.len())?;
    Ok(set.sum_products(linked_only, |a, b| bath.correlation(s[a], s[b])))
}
