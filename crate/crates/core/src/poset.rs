//! Small finite posets: products, and isomorphism testing by backtracking.

use std::collections::HashMap;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("poset with {size} elements exceeds the isomorphism cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("isomorphism search timed out")]
    Timeout,
}

/// A finite poset on `0..len`, stored as the up-set of every element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    up: Vec<FixedBitSet>,
}

impl Poset {
    /// Builds a poset from a reflexive, antisymmetric, transitive relation.
    pub fn from_relation(len: usize, leq: impl Fn(usize, usize) -> bool) -> Self {
        let up = (0..len)
            .map(|a| {
                let mut s = FixedBitSet::with_capacity(len);
                for b in 0..len {
                    if leq(a, b) {
                        s.insert(b);
                    }
                }
                s
            })
            .collect();
        Poset { up }
    }

    /// A chain with `len` elements.
    pub fn chain(len: usize) -> Self {
        Self::from_relation(len, |a, b| a <= b)
    }

    /// The antichain with `len` elements.
    pub fn antichain(len: usize) -> Self {
        Self::from_relation(len, |a, b| a == b)
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    /// Componentwise order on the cartesian product; element `(a, b)` has
    /// index `a * other.len() + b`.
    pub fn product(&self, other: &Poset) -> Poset {
        let m = other.len();
        Self::from_relation(self.len() * m, |x, y| {
            self.leq(x / m, y / m) && other.leq(x % m, y % m)
        })
    }

    pub fn product_all(factors: &[Poset]) -> Poset {
        factors
            .iter()
            .fold(Poset::chain(1), |acc, p| acc.product(p))
    }

    fn down_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.len()];
        for up in &self.up {
            for b in up.ones() {
                counts[b] += 1;
            }
        }
        counts
    }

    fn covers(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let mut below = vec![0; n];
        let mut above = vec![0; n];
        for (a, up) in self.up.iter().enumerate() {
            for b in up.ones() {
                if a == b {
                    continue;
                }
                let between = up
                    .ones()
                    .any(|c| c != a && c != b && self.leq(c, b));
                if !between {
                    above[a] += 1;
                    below[b] += 1;
                }
            }
        }
        (below, above)
    }

    /// Order-invariant label of every element, used to prune the search.
    fn signatures(&self) -> Vec<[usize; 4]> {
        let down = self.down_counts();
        let (cov_below, cov_above) = self.covers();
        (0..self.len())
            .map(|a| [down[a], self.up[a].count_ones(..), cov_below[a], cov_above[a]])
            .collect()
    }
}

/// Bounds on an isomorphism search.
#[derive(Debug, Clone, Copy)]
pub struct IsoLimits {
    pub max_elements: usize,
    pub deadline: Option<Instant>,
}

impl Default for IsoLimits {
    fn default() -> Self {
        IsoLimits {
            max_elements: 10_000,
            deadline: None,
        }
    }
}

/// Colors both posets jointly by iterated refinement of the signatures over
/// strict up-sets and down-sets; isomorphisms preserve colors.
fn refined_colors(p: &Poset, q: &Poset) -> (Vec<usize>, Vec<usize>) {
    let posets = [p, q];
    let downs: Vec<Vec<Vec<usize>>> = posets
        .iter()
        .map(|x| {
            let mut d = vec![Vec::new(); x.len()];
            for a in 0..x.len() {
                for b in x.up[a].ones().filter(|&b| b != a) {
                    d[b].push(a);
                }
            }
            d
        })
        .collect();
    let mut dict: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut colors: Vec<Vec<usize>> = posets
        .iter()
        .map(|x| {
            x.signatures()
                .into_iter()
                .map(|s| {
                    let next = dict.len();
                    *dict.entry(s.to_vec()).or_insert(next)
                })
                .collect()
        })
        .collect();
    let mut classes = dict.len();
    loop {
        let mut dict: HashMap<Vec<usize>, usize> = HashMap::new();
        let next: Vec<Vec<usize>> = (0..2)
            .map(|t| {
                let x = posets[t];
                (0..x.len())
                    .map(|a| {
                        let mut up: Vec<usize> = x.up[a].ones().filter(|&b| b != a).map(|b| colors[t][b]).collect();
                        let mut down: Vec<usize> = downs[t][a].iter().map(|&b| colors[t][b]).collect();
                        up.sort_unstable();
                        down.sort_unstable();
                        let mut key = vec![colors[t][a], usize::MAX];
                        key.extend(up);
                        key.push(usize::MAX);
                        key.extend(down);
                        let fresh = dict.len();
                        *dict.entry(key).or_insert(fresh)
                    })
                    .collect()
            })
            .collect();
        colors = next;
        if dict.len() == classes {
            break;
        }
        classes = dict.len();
    }
    let q_colors = colors.pop().expect("two posets");
    (colors.pop().expect("two posets"), q_colors)
}

/// Searches for an order isomorphism `p -> q`; the witness maps each element of
/// `p` to its image. The search visits candidates in increasing index order, so
/// the witness is deterministic.
pub fn is_poset_isomorphic(p: &Poset, q: &Poset, limits: IsoLimits) -> Result<Option<Vec<usize>>, PosetError> {
    for size in [p.len(), q.len()] {
        if size > limits.max_elements {
            return Err(PosetError::TooLarge {
                size,
                cap: limits.max_elements,
            });
        }
    }
    if p.len() != q.len() {
        return Ok(None);
    }
    let (sp, sq) = refined_colors(p, q);
    let mut sorted_p = sp.clone();
    let mut sorted_q = sq.clone();
    sorted_p.sort_unstable();
    sorted_q.sort_unstable();
    if sorted_p != sorted_q {
        return Ok(None);
    }
    // Assign elements of p bottom-up so comparabilities are checked early.
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&a| (p.up[a].count_ones(..), a));
    order.reverse();
    let mut search = Search {
        p,
        q,
        sp: &sp,
        sq: &sq,
        order: &order,
        image: vec![usize::MAX; p.len()],
        used: vec![false; q.len()],
        nodes: 0,
        deadline: limits.deadline,
    };
    if search.extend(0)? {
        Ok(Some(search.image))
    } else {
        Ok(None)
    }
}

struct Search<'a> {
    p: &'a Poset,
    q: &'a Poset,
    sp: &'a [usize],
    sq: &'a [usize],
    order: &'a [usize],
    image: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    deadline: Option<Instant>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> Result<bool, PosetError> {
        if depth == self.order.len() {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(PosetError::Timeout);
        }
        let x = self.order[depth];
        for cand in 0..self.q.len() {
            if self.used[cand] || self.sq[cand] != self.sp[x] {
                continue;
            }
            let consistent = self.order[..depth].iter().all(|&y| {
                let fy = self.image[y];
                self.p.leq(x, y) == self.q.leq(cand, fy) && self.p.leq(y, x) == self.q.leq(fy, cand)
            });
            if !consistent {
                continue;
            }
            self.image[x] = cand;
            self.used[cand] = true;
            if self.extend(depth + 1)? {
                return Ok(true);
            }
            self.used[cand] = false;
            self.image[x] = usize::MAX;
        }
        Ok(false)
    }
}
