use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest point count whose pairings are enumerated (10395 matchings).
pub const PAIRING_GUARD: usize = 12;

/// A perfect matching of points `0..2n`, stored as arcs `(i, j)` with `i < j`
/// sorted by their left end.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    arcs: Vec<(usize, usize)>,
}

impl Pairing {
    /// Builds a pairing from arcs, checking that it is a perfect matching.
    pub fn new(arcs: Vec<(usize, usize)>) -> Result<Self> {
        let n = 2 * arcs.len();
        let mut seen = vec![false; n];
        let mut arcs: Vec<_> = arcs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        for &(a, b) in &arcs {
            if a == b || b >= n || seen[a] || seen[b] {
                return Err(Error::numerical(format!("{arcs:?} is not a perfect matching")));
            }
            seen[a] = true;
            seen[b] = true;
        }
        arcs.sort_unstable();
        Ok(Pairing { arcs })
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn points(&self) -> usize {
        2 * self.arcs.len()
    }
}

impl fmt::Display for Pairing {
    // 1-based, the way diagrams are usually labelled
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.arcs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({}, {})", a + 1, b + 1)?;
        }
        f.write_str("}")
    }
}

/// All perfect matchings of `m` points, ordered by the partner of the
/// smallest unmatched point. Odd `m` has none.
pub fn enumerate_pairings(m: usize) -> Result<Vec<Pairing>> {
    if m > PAIRING_GUARD {
        return Err(Error::TooManyPoints {
            points: m,
            guard: PAIRING_GUARD,
        });
    }
    if m % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut free: Vec<usize> = (0..m).collect();
    let mut arcs = Vec::with_capacity(m / 2);
    extend(&mut free, &mut arcs, &mut out);
    Ok(out)
}

fn extend(free: &mut Vec<usize>, arcs: &mut Vec<(usize, usize)>, out: &mut Vec<Pairing>) {
    if free.is_empty() {
        out.push(Pairing { arcs: arcs.clone() });
        return;
    }
    let first = free.remove(0);
    for i in 0..free.len() {
        let partner = free.remove(i);
        arcs.push((first, partner));
        extend(free, arcs, out);
        arcs.pop();
        free.insert(i, partner);
    }
    free.insert(0, first);
}

/// Whether the arcs form a connected graph under crossing.
///
/// Arcs `(a, b)` and `(c, d)` cross when exactly one of `c, d` lies strictly
/// between `a` and `b`. The empty pairing counts as linked.
pub fn is_linked(p: &Pairing) -> bool {
    let arcs = p.arcs();
    let n = arcs.len();
    if n <= 1 {
        return true;
    }
    let crosses = |(a, b): (usize, usize), (c, d): (usize, usize)| {
        let inside = |x: usize| a < x && x < b;
        inside(c) != inside(d)
    };
    let mut reached = vec![false; n];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !reached[j] && crosses(arcs[i], arcs[j]) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Cached pairings of a fixed point count, with the linked ones split out.
#[derive(Debug)]
pub struct PairingSet {
    points: usize,
    all: Vec<Pairing>,
    linked: Vec<Pairing>,
}

impl PairingSet {
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn all(&self) -> &[Pairing] {
        &self.all
    }

    pub fn linked(&self) -> &[Pairing] {
        &self.linked
    }

    pub fn select(&self, linked_only: bool) -> &[Pairing] {
        if linked_only {
            &self.linked
        } else {
            &self.all
        }
    }
}

/// Memoized [`PairingSet`] for `m` points.
pub fn pairing_set(m: usize) -> Result<&'static PairingSet> {
    static CACHE: [OnceLock<PairingSet>; PAIRING_GUARD + 1] = [const { OnceLock::new() }; PAIRING_GUARD + 1];
    if m > PAIRING_GUARD {
        return Err(Error::TooManyPoints {
            points: m,
            guard: PAIRING_GUARD,
        });
    }
    Ok(CACHE[m].get_or_init(|| {
        let all = enumerate_pairings(m).expect("within guard");
        let linked = all.iter().filter(|p| is_linked(p)).cloned().collect();
        PairingSet { points: m, all, linked }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(arcs: &[(usize, usize)]) -> Pairing {
        Pairing::new(arcs.to_vec()).unwrap()
    }

    #[test]
    fn four_points_in_order() {
        let all = enumerate_pairings(4).unwrap();
        assert_eq!(all, vec![p(&[(0, 1), (2, 3)]), p(&[(0, 2), (1, 3)]), p(&[(0, 3), (1, 2)])]);
        assert_eq!(all[1].to_string(), "{(1, 3), (2, 4)}");
    }

    #[test]
    fn linked_examples() {
        assert!(is_linked(&p(&[(0, 1)])));
        assert!(is_linked(&p(&[(0, 2), (1, 3)])));
        assert!(!is_linked(&p(&[(0, 1), (2, 3)])));
        assert!(!is_linked(&p(&[(0, 3), (1, 2)])));
    }

    #[test]
    fn odd_and_oversized() {
        assert!(enumerate_pairings(5).unwrap().is_empty());
        assert!(matches!(enumerate_pairings(14), Err(Error::TooManyPoints { .. })));
        assert!(pairing_set(14).is_err());
        assert_eq!(enumerate_pairings(0).unwrap().len(), 1);
    }

    #[test]
    fn rejects_non_matchings() {
        assert!(Pairing::new(vec![(0, 1), (1, 2)]).is_err());
        assert!(Pairing::new(vec![(0, 5)]).is_err());
    }

    #[test]
    fn every_enumerated_pairing_is_a_matching() {
        for m in [2, 4, 6, 8] {
            let all = enumerate_pairings(m).unwrap();
            for q in &all {
                assert!(Pairing::new(q.arcs().to_vec()).is_ok());
            }
            let mut dedup = all.clone();
            dedup.sort_by(|a, b| a.arcs().cmp(b.arcs()));
            dedup.dedup();
            assert_eq!(dedup.len(), all.len());
        }
    }

    #[test]
    fn memoized_set_matches_filter() {
        let s = pairing_set(6).unwrap();
        assert_eq!(s.all().len(), 15);
        assert_eq!(s.linked().len(), 4);
        assert!(std::ptr::eq(s, pairing_set(6).unwrap()));
    }
}
