//! Lexicographic enumeration of index subsets.
//!
//! Rows and columns of compound matrices and entries of d-hat vectors are
//! indexed by subsets in lexicographic order; everything in this crate goes
//! through the functions here so the ordering has a single definition.

use super::LinalgError;

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral
        let num = (n - i) as u128;
        match acc.checked_mul(num) {
            Some(v) => acc = v / (i as u128 + 1),
            None => {
                let g = gcd(acc, i as u128 + 1);
                let a = acc / g;
                let d = (i as u128 + 1) / g;
                match a.checked_mul(num / d) {
                    Some(v) => acc = v,
                    None => return u128::MAX,
                }
            }
        }
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Binomial coefficient as `usize`; panics if it does not fit.
pub fn binomial_usize(n: usize, k: usize) -> usize {
    usize::try_from(binomial(n, k)).expect("binomial coefficient overflows usize")
}

/// A subset of `{1..n}` with strictly increasing 1-based members.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSubset {
    n: usize,
    members: Vec<usize>,
}

impl IndexSubset {
    pub fn new(n: usize, members: Vec<usize>) -> Result<Self, LinalgError> {
        let ok = members.iter().all(|&x| x >= 1 && x <= n)
            && members.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(LinalgError::InvalidSubset { n, members });
        }
        Ok(IndexSubset { n, members })
    }

    pub(crate) fn from_zero_based(n: usize, idx: &[usize]) -> Self {
        IndexSubset { n, members: idx.iter().map(|&i| i + 1).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// 0-based position among all subsets of the same size in lexicographic order.
    pub fn position(&self) -> usize {
        let idx: Vec<usize> = self.members.iter().map(|&i| i - 1).collect();
        subset_rank(self.n, &idx)
    }

    /// Inverse of [`IndexSubset::position`].
    pub fn at_position(n: usize, k: usize, pos: usize) -> Result<Self, LinalgError> {
        if k > n || (pos as u128) >= binomial(n, k) {
            return Err(LinalgError::SubsetPositionOutOfRange { n, k, pos });
        }
        Ok(Self::from_zero_based(n, &subset_unrank(n, k, pos)))
    }
}

/// Lexicographic rank of a strictly increasing 0-based subset of `0..n`.
pub(crate) fn subset_rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut rank: u128 = 0;
    let mut prev: usize = 0;
    for (i, &c) in idx.iter().enumerate() {
        for j in prev..c {
            rank += binomial(n - 1 - j, k - 1 - i);
        }
        prev = c + 1;
    }
    rank as usize
}

pub(crate) fn subset_unrank(n: usize, k: usize, mut pos: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for i in 0..k {
        let mut c = next;
        loop {
            let block = binomial(n - 1 - c, k - 1 - i) as usize;
            if pos < block {
                break;
            }
            pos -= block;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Iterator over all k-subsets of `0..n` (0-based) in lexicographic order.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations { n, cur: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.cur.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.n - k + i {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All k-subsets of `0..n`, 0-based, lexicographic.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations::new(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(20, 5), 15504);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn enumeration_matches_rank() {
        for n in 0..8 {
            for k in 0..=n {
                let all: Vec<_> = combinations(n, k).collect();
                assert_eq!(all.len() as u128, binomial(n, k));
                for (pos, s) in all.iter().enumerate() {
                    assert_eq!(subset_rank(n, s), pos);
                    assert_eq!(&subset_unrank(n, k, pos), s);
                }
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn one_based_subsets() {
        let s = IndexSubset::new(5, vec![2, 4]).unwrap();
        // {1,2},{1,3},{1,4},{1,5},{2,3},{2,4}
        assert_eq!(s.position(), 5);
        assert_eq!(IndexSubset::at_position(5, 2, 5).unwrap(), s);
        assert!(IndexSubset::new(5, vec![3, 3]).is_err());
        assert!(IndexSubset::new(5, vec![0, 3]).is_err());
        assert!(IndexSubset::at_position(5, 2, 10).is_err());
    }
}
