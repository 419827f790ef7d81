//! Permutations on a few hundred points and a deterministic Schreier-Sims
//! stabilizer chain (Knuth's sift-and-extend formulation), used for exact
//! orders and membership in the finite level quotients.

use num_bigint::BigUint;

/// A permutation of `0..degree`. Composition is left to right:
/// `p.then(q)` applies `p` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&i| !std::mem::replace(&mut seen[i as usize], true))
        });
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.0[point] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    pub fn then(&self, q: &Perm) -> Perm {
        Perm(self.0.iter().map(|&i| q.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Perm(inv)
    }

    /// `s^-1 self s`.
    pub fn conjugate(&self, s: &Perm) -> Perm {
        s.inverse().then(self).then(s)
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// `reps[j]` maps `base` to `j`, when `j` is in the basic orbit.
    reps: Vec<Option<Perm>>,
}

/// Stabilizer chain with base `0, 1, ..., degree - 1`.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        let levels = (0..degree)
            .map(|base| {
                let mut reps = vec![None; degree];
                reps[base] = Some(Perm::identity(degree));
                Level {
                    base,
                    gens: Vec::new(),
                    reps,
                }
            })
            .collect();
        let mut chain = StabChain { degree, levels };
        for g in gens {
            chain.insert(0, g.clone());
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Adds `g` to the group (no-op if already a member).
    pub fn add_generator(&mut self, g: Perm) -> bool {
        if self.contains(&g) {
            return false;
        }
        self.insert(0, g);
        true
    }

    fn sift_from(&self, k: usize, g: &Perm) -> Option<Perm> {
        let mut p = g.clone();
        for level in &self.levels[k..] {
            let j = p.apply(level.base);
            match &level.reps[j] {
                Some(rep) => p = p.then(&rep.inverse()),
                None => return Some(p),
            }
        }
        debug_assert!(p.is_identity());
        None
    }

    // Knuth's procedure A: make g a member of the level-k group.
    fn insert(&mut self, k: usize, g: Perm) {
        if k >= self.degree || self.sift_from(k, &g).is_none() {
            return;
        }
        self.levels[k].gens.push(g.clone());
        let reps: Vec<Perm> = self.levels[k].reps.iter().flatten().cloned().collect();
        for rep in reps {
            self.update(k, rep.then(&g));
        }
    }

    // Knuth's procedure B: record g (which fixes bases 0..k) in the orbit data.
    fn update(&mut self, k: usize, g: Perm) {
        let j = g.apply(self.levels[k].base);
        match &self.levels[k].reps[j] {
            Some(rep) => {
                let h = g.then(&rep.inverse());
                self.insert(k + 1, h);
            }
            None => {
                self.levels[k].reps[j] = Some(g.clone());
                let gens = self.levels[k].gens.clone();
                for s in gens {
                    self.update(k, g.then(&s));
                }
            }
        }
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(0, g).is_none()
    }

    /// Sizes of the basic orbits.
    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels
            .iter()
            .map(|l| l.reps.iter().filter(|r| r.is_some()).count())
            .collect()
    }

    pub fn order(&self) -> BigUint {
        self.orbit_sizes()
            .into_iter()
            .fold(BigUint::from(1u32), |acc, s| acc * BigUint::from(s))
    }

    /// Base points with a nontrivial basic orbit, together with orbit sizes.
    pub fn base(&self) -> Vec<(usize, usize)> {
        self.levels
            .iter()
            .map(|l| (l.base, l.reps.iter().filter(|r| r.is_some()).count()))
            .filter(|&(_, s)| s > 1)
            .collect()
    }

    /// Strong generators collected across all levels.
    pub fn strong_generators(&self) -> Vec<Perm> {
        self.levels.iter().flat_map(|l| l.gens.iter().cloned()).collect()
    }
}

/// Normal closure of `seeds` under conjugation by `gens`.
pub fn normal_closure(degree: usize, seeds: &[Perm], gens: &[Perm]) -> StabChain {
    let mut chain = StabChain::new(degree, &[]);
    let mut queue: Vec<Perm> = Vec::new();
    for s in seeds {
        if chain.add_generator(s.clone()) {
            queue.push(s.clone());
        }
    }
    while let Some(h) = queue.pop() {
        for s in gens {
            let c = h.conjugate(s);
            if chain.add_generator(c.clone()) {
                queue.push(c);
            }
        }
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(degree: usize) -> Perm {
        Perm::from_images((0..degree as u32).map(|i| (i + 1) % degree as u32).collect())
    }

    fn transposition(degree: usize, a: usize, b: usize) -> Perm {
        let mut v: Vec<u32> = (0..degree as u32).collect();
        v.swap(a, b);
        Perm::from_images(v)
    }

    #[test]
    fn cyclic_and_symmetric_orders() {
        let c5 = StabChain::new(5, &[cycle(5)]);
        assert_eq!(c5.order(), BigUint::from(5u32));
        let s6 = StabChain::new(6, &[cycle(6), transposition(6, 0, 1)]);
        assert_eq!(s6.order(), BigUint::from(720u32));
        assert!(s6.contains(&transposition(6, 2, 5)));
        assert!(!c5.contains(&transposition(5, 0, 1)));
        assert!(c5.contains(&cycle(5).then(&cycle(5))));
    }

    #[test]
    fn dihedral_subgroup_membership() {
        // D4 on the square 0-1-2-3
        let r = cycle(4);
        let f = Perm::from_images(vec![0, 3, 2, 1]);
        let d4 = StabChain::new(4, &[r.clone(), f]);
        assert_eq!(d4.order(), BigUint::from(8u32));
        assert!(!d4.contains(&transposition(4, 0, 1)));
        // normal closure of r^2 is the center
        let z = normal_closure(4, &[r.then(&r)], std::slice::from_ref(&r));
        assert_eq!(z.order(), BigUint::from(2u32));
    }

    #[test]
    fn normal_closure_of_transposition_is_symmetric_group() {
        let gens = [cycle(5), transposition(5, 0, 1)];
        let n = normal_closure(5, &[transposition(5, 0, 1)], &gens);
        assert_eq!(n.order(), BigUint::from(120u32));
        let a5 = normal_closure(5, &[cycle(5)], &gens);
        assert_eq!(a5.order(), BigUint::from(60u32));
    }
}
