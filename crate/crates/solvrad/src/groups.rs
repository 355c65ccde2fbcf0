//! Permutation groups generated by monodromy: full enumeration, orbits,
//! derived series, solvability verdicts, and character tables of the abelian
//! quotients along the series.
//!
//! Degrees here are desk scale (single digits), so plain BFS closure beats
//! anything clever and keeps every derived object easy to verify.

use crate::error::{Error, Result};
use crate::exact::RootOfUnity;
use std::cell::OnceCell;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

/// A permutation of `{0..n-1}`, stored as its image table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Box<[u8]>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        assert!(n <= u8::MAX as usize);
        Perm {
            images: (0..n as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::BadInput(format!("not a bijection: {images:?}")));
            }
            seen[v] = true;
        }
        Ok(Perm {
            images: images.into_iter().map(|v| v as u8).collect(),
        })
    }

    /// Build from 1-based disjoint cycles, e.g. `&[vec![1, 2]]` on n points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for k in 0..cyc.len() {
                let a = cyc[k]
                    .checked_sub(1)
                    .ok_or_else(|| Error::BadInput("cycle entries are 1-based".into()))?;
                let b = cyc[(k + 1) % cyc.len()] - 1;
                if a >= n || b >= n {
                    return Err(Error::BadInput(format!("cycle entry out of range 1..={n}")));
                }
                images[a] = b;
            }
        }
        Perm::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }
    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u8 == v)
    }

    /// Function composition: `(self . other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&v| self.images[v as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm { images: inv.into() }
    }

    pub fn order(&self) -> usize {
        let mut k = 1;
        let mut p = self.clone();
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    /// Nontrivial cycles, 0-based, each rotated to start at its minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.apply(cur);
            }
            out.push(cyc);
        }
        out
    }

    pub fn is_transposition(&self) -> bool {
        let c = self.cycles();
        c.len() == 1 && c[0].len() == 2
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, 1-based; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cyc in cycles {
            let parts: Vec<String> = cyc.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Perm {
    /// Parse cycle notation at a known degree (`"()"` is the identity).
    pub fn parse(s: &str, n: usize) -> Result<Perm> {
        let s = s.trim();
        if s == "()" {
            return Ok(Perm::identity(n));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let Some(open) = rest.find('(') else {
                return Err(Error::BadInput(format!("bad cycle notation `{s}`")));
            };
            let Some(close) = rest.find(')') else {
                return Err(Error::BadInput(format!("bad cycle notation `{s}`")));
            };
            let inner = &rest[open + 1..close];
            if !inner.trim().is_empty() {
                let cyc: Vec<usize> = inner
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<usize>()
                            .map_err(|_| Error::BadInput(format!("bad cycle entry `{tok}`")))
                    })
                    .collect::<Result<_>>()?;
                cycles.push(cyc);
            }
            rest = &rest[close + 1..];
        }
        Perm::from_cycles(n, &cycles)
    }
}

impl FromStr for Perm {
    type Err = Error;
    /// Parse with the degree inferred from the largest entry.
    fn from_str(s: &str) -> Result<Perm> {
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().unwrap_or(0))
            .max()
            .unwrap_or(0);
        Perm::parse(s, max.max(1))
    }
}

/// Solvability verdict from the derived series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solvability {
    /// The m-th derived subgroup is trivial.
    Solvable { steps: usize },
    /// The series stabilized at a nontrivial perfect group of this order.
    Unsolvable { core_order: usize },
}

/// Terminal state of a derived series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    Solvable { steps: usize },
    Perfect { core_order: usize },
}

/// A permutation group given by generators, with lazily cached enumeration.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    cap: usize,
    elements: OnceCell<Vec<Perm>>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>, cap: usize) -> Result<PermGroup> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(g.degree(), degree));
            }
        }
        Ok(PermGroup {
            degree,
            generators,
            cap,
            elements: OnceCell::new(),
        })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, vec![], usize::MAX).expect("no generators")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// BFS closure under generator multiplication, sorted for determinism.
    pub fn elements(&self) -> Result<&[Perm]> {
        if let Some(e) = self.elements.get() {
            return Ok(e);
        }
        let e = generate_elements(&self.generators, self.degree, self.cap)?;
        Ok(self.elements.get_or_init(|| e))
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, p: &Perm) -> Result<bool> {
        Ok(self.elements()?.binary_search(p).is_ok())
    }

    /// Orbit partition of `{0..n-1}` under the generators, each orbit sorted.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.degree;
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut Vec<usize>, i: usize) -> usize {
            if comp[i] != i {
                let r = find(comp, comp[i]);
                comp[i] = r;
            }
            comp[i]
        }
        for g in &self.generators {
            for i in 0..n {
                let a = find(&mut comp, i);
                let b = find(&mut comp, g.apply(i));
                if a != b {
                    comp[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let r = find(&mut comp, i);
            groups.entry(r).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        for o in &mut out {
            o.sort();
        }
        out.sort();
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().len() == 1
    }

    /// The action restricted to one orbit, points reindexed by orbit order.
    pub fn restrict_to_orbit(&self, orbit: &[usize]) -> Result<PermGroup> {
        let index: HashMap<usize, usize> =
            orbit.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let images: Vec<usize> = orbit
                    .iter()
                    .map(|&p| {
                        index.get(&g.apply(p)).copied().ok_or_else(|| {
                            Error::BadInput("orbit not closed under the action".into())
                        })
                    })
                    .collect::<Result<_>>()?;
                Perm::from_images(images)
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(orbit.len(), gens, self.cap)
    }

    /// Commutator subgroup with a greedily minimized generator set.
    ///
    /// Small groups take commutators over all enumerated element pairs; past
    /// a pair threshold the same subgroup is produced as the normal closure
    /// of generator commutators (the two routes are tested to agree).
    pub fn derived_subgroup(&self) -> Result<PermGroup> {
        const PAIR_LIMIT: usize = 2048;
        let elements = self.elements()?;
        let mut comms: Vec<Perm> = Vec::new();
        let mut seen: HashSet<Perm> = HashSet::new();
        if elements.len() <= PAIR_LIMIT {
            for g in elements {
                for h in elements {
                    let c = commutator(g, h);
                    if !c.is_identity() && seen.insert(c.clone()) {
                        comms.push(c);
                    }
                }
            }
        } else {
            for g in &self.generators {
                for h in &self.generators {
                    let c = commutator(g, h);
                    if !c.is_identity() && seen.insert(c.clone()) {
                        comms.push(c);
                    }
                }
            }
            // normal closure under conjugation by the parent generators
            loop {
                let sub = generate_elements(&comms, self.degree, self.cap)?;
                let sub_set: HashSet<&Perm> = sub.iter().collect();
                let mut grew = false;
                'outer: for g in &self.generators {
                    let ginv = g.inverse();
                    for s in &sub {
                        let conj = ginv.compose(s).compose(g);
                        if !sub_set.contains(&conj) {
                            comms.push(conj);
                            grew = true;
                            break 'outer;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
        }
        let full = generate_elements(&comms, self.degree, self.cap)?;
        let gens = greedy_generators(&full, self.degree, self.cap)?;
        let g = PermGroup::new(self.degree, gens, self.cap)?;
        let _ = g.elements.set(full);
        Ok(g)
    }

    /// The chain `G ⊇ G' ⊇ G'' ⊇ ...` down to the identity or a perfect core.
    pub fn derived_series(&self) -> Result<DerivedSeries> {
        let mut chain = vec![self.clone()];
        loop {
            let last = chain.last().unwrap();
            let last_order = last.order()?;
            if last_order == 1 {
                return Ok(DerivedSeries {
                    terminal: Terminal::Solvable {
                        steps: chain.len() - 1,
                    },
                    chain,
                });
            }
            let next = last.derived_subgroup()?;
            let next_order = next.order()?;
            chain.push(next);
            if next_order == last_order {
                return Ok(DerivedSeries {
                    terminal: Terminal::Perfect {
                        core_order: next_order,
                    },
                    chain,
                });
            }
        }
    }

    pub fn is_solvable(&self) -> Result<Solvability> {
        Ok(match self.derived_series()?.terminal {
            Terminal::Solvable { steps } => Solvability::Solvable { steps },
            Terminal::Perfect { core_order } => Solvability::Unsolvable { core_order },
        })
    }
}

fn commutator(g: &Perm, h: &Perm) -> Perm {
    g.inverse().compose(&h.inverse()).compose(g).compose(h)
}

/// BFS closure of the generators under multiplication.
pub fn generate_elements(gens: &[Perm], degree: usize, cap: usize) -> Result<Vec<Perm>> {
    for g in gens {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch(g.degree(), degree));
        }
    }
    let id = Perm::identity(degree);
    let mut set: HashSet<Perm> = HashSet::new();
    set.insert(id.clone());
    let mut queue: VecDeque<Perm> = VecDeque::new();
    queue.push_back(id);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next = cur.compose(g);
            if set.insert(next.clone()) {
                if set.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Perm> = set.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Small generator set for a fully enumerated group: try elements in
/// decreasing order, keep the ones that enlarge the generated subgroup.
fn greedy_generators(elements: &[Perm], degree: usize, cap: usize) -> Result<Vec<Perm>> {
    if elements.len() <= 1 {
        return Ok(vec![]);
    }
    let mut candidates: Vec<&Perm> = elements.iter().filter(|p| !p.is_identity()).collect();
    candidates.sort_by_key(|p| std::cmp::Reverse(p.order()));
    let mut gens: Vec<Perm> = Vec::new();
    let mut span = 1usize;
    for c in candidates {
        if span == elements.len() {
            break;
        }
        let mut trial = gens.clone();
        trial.push(c.clone());
        let new_span = generate_elements(&trial, degree, cap)?.len();
        if new_span > span {
            gens = trial;
            span = new_span;
        }
    }
    Ok(gens)
}

/// Derived series with its terminal state.
#[derive(Clone, Debug)]
pub struct DerivedSeries {
    pub chain: Vec<PermGroup>,
    pub terminal: Terminal,
}

impl DerivedSeries {
    pub fn chain_orders(&self) -> Result<Vec<usize>> {
        self.chain.iter().map(|g| g.order()).collect()
    }
    pub fn is_solvable(&self) -> bool {
        matches!(self.terminal, Terminal::Solvable { .. })
    }
}

/// Character table of an abelian quotient `G/H`, with exact root-of-unity
/// values on coset representatives.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub quotient_order: usize,
    /// Orders of the cyclic factors.
    pub factor_orders: Vec<u32>,
    /// One representative per coset; `reps[0]` is the identity coset.
    pub reps: Vec<Perm>,
    /// `values[chi][coset]`, rows indexed like mixed-radix counters over the
    /// factor orders; row 0 is the trivial character.
    pub values: Vec<Vec<RootOfUnity>>,
}

impl CharacterTable {
    /// Order of character `chi` (the lcm of its value orders).
    pub fn character_order(&self, chi: usize) -> u32 {
        self.values[chi]
            .iter()
            .map(|z| z.order())
            .fold(1u32, num_integer::lcm)
    }
}

/// Characters of `G/H` for `H` normal in `G` with abelian quotient —
/// the situation along a derived series. Errors with [`Error::NotNormal`] or
/// [`Error::NotAbelian`] otherwise.
pub fn quotient_characters(g: &PermGroup, h: &PermGroup) -> Result<CharacterTable> {
    if g.degree() != h.degree() {
        return Err(Error::DegreeMismatch(g.degree(), h.degree()));
    }
    let h_elems = h.elements()?;
    // normality: conjugates of H generators by G generators stay in H
    for gg in g.generators() {
        let ginv = gg.inverse();
        for hh in h.generators() {
            let conj = ginv.compose(hh).compose(gg);
            if !h.contains(&conj)? {
                return Err(Error::NotNormal);
            }
        }
    }
    let g_elems = g.elements()?;
    // coset decomposition, keyed by the lex-min element of each coset
    let mut coset_key: HashMap<Perm, Perm> = HashMap::new(); // element -> key
    let mut reps: Vec<Perm> = Vec::new();
    for e in g_elems {
        if coset_key.contains_key(e) {
            continue;
        }
        let coset: Vec<Perm> = h_elems.iter().map(|hh| e.compose(hh)).collect();
        let key = coset.iter().min().unwrap().clone();
        for member in coset {
            coset_key.insert(member, key.clone());
        }
        reps.push(key);
    }
    reps.sort();
    // identity coset first: its min element is the identity, the global min
    debug_assert!(reps[0].is_identity());
    let m = reps.len();
    let rep_index: HashMap<&Perm, usize> = reps.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let coset_of = |p: &Perm| -> usize {
        let key = &coset_key[p];
        rep_index[key]
    };
    // quotient multiplication table and abelianness
    let mut mul = vec![vec![0usize; m]; m];
    for (i, a) in reps.iter().enumerate() {
        for (j, b) in reps.iter().enumerate() {
            mul[i][j] = coset_of(&a.compose(b));
        }
    }
    for i in 0..m {
        for j in 0..m {
            if mul[i][j] != mul[j][i] {
                return Err(Error::NotAbelian);
            }
        }
    }
    // orders in the quotient
    let order_of = |i: usize| -> u32 {
        let mut k = 1u32;
        let mut cur = i;
        while cur != 0 {
            cur = mul[cur][i];
            k += 1;
        }
        k
    };
    // brute-force search for an independent generating tuple: the products
    // gen_1^{e_1} ... gen_r^{e_r} must hit every coset exactly once
    let mut order_list: Vec<(usize, u32)> = (0..m).map(|i| (i, order_of(i))).collect();
    order_list.sort_by_key(|&(i, o)| (std::cmp::Reverse(o), i));
    let decomp = find_cyclic_decomposition(&mul, m, &order_list)
        .ok_or_else(|| Error::BadInput("no cyclic decomposition found (internal)".into()))?;
    let (gen_ids, factor_orders, coords) = decomp;
    debug_assert_eq!(gen_ids.len(), factor_orders.len());

    // characters: chi_k(coset with coords e) = prod_j zeta_{d_j}^{k_j e_j}
    let nchars: usize = factor_orders.iter().map(|&d| d as usize).product::<usize>().max(1);
    debug_assert_eq!(nchars, m);
    let mut values = Vec::with_capacity(m);
    let mut k = vec![0u32; factor_orders.len()];
    for _ in 0..nchars {
        let mut row = Vec::with_capacity(m);
        for coset in 0..m {
            let mut z = RootOfUnity::one();
            for (j, &d) in factor_orders.iter().enumerate() {
                let e = coords[coset][j];
                z = z.mul(RootOfUnity::new((k[j] * e) % d, d));
            }
            row.push(z);
        }
        values.push(row);
        // increment mixed-radix counter
        for j in (0..k.len()).rev() {
            k[j] += 1;
            if k[j] < factor_orders[j] {
                break;
            }
            k[j] = 0;
        }
    }
    Ok(CharacterTable {
        quotient_order: m,
        factor_orders,
        reps,
        values,
    })
}

/// Find generators of an abelian group (given by its multiplication table)
/// whose power products enumerate it bijectively. Returns the generator
/// indices, their orders, and each element's coordinate vector.
#[allow(clippy::type_complexity)]
fn find_cyclic_decomposition(
    mul: &[Vec<usize>],
    m: usize,
    order_list: &[(usize, u32)],
) -> Option<(Vec<usize>, Vec<u32>, Vec<Vec<u32>>)> {
    if m == 1 {
        return Some((vec![], vec![], vec![vec![]]));
    }
    let pow = |base: usize, e: u32| -> usize {
        let mut cur = 0usize; // identity coset
        for _ in 0..e {
            cur = mul[cur][base];
        }
        cur
    };
    // try index tuples of increasing length, strictly increasing within each
    let candidates: Vec<(usize, u32)> = order_list
        .iter()
        .filter(|&&(_, o)| o > 1)
        .copied()
        .collect();
    for r in 1..=4usize.min(candidates.len()) {
        let mut found = None;
        each_combination(candidates.len(), r, &mut |idx: &[usize]| {
            if found.is_some() {
                return;
            }
            let prod: u64 = idx.iter().map(|&i| candidates[i].1 as u64).product();
            if prod != m as u64 {
                return;
            }
            let gens: Vec<usize> = idx.iter().map(|&i| candidates[i].0).collect();
            let orders: Vec<u32> = idx.iter().map(|&i| candidates[i].1).collect();
            if let Some(coords) = try_coords(mul, m, &gens, &orders, &pow) {
                found = Some((gens, orders, coords));
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Visit all strictly increasing index tuples of length `r` drawn from `0..n`.
fn each_combination(n: usize, r: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == r {
            visit(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, r, i + 1, cur, visit);
            cur.pop();
        }
    }
    go(n, r, 0, &mut Vec::new(), visit);
}

fn try_coords(
    mul: &[Vec<usize>],
    m: usize,
    gens: &[usize],
    orders: &[u32],
    pow: &dyn Fn(usize, u32) -> usize,
) -> Option<Vec<Vec<u32>>> {
    let mut coords = vec![None; m];
    let mut e = vec![0u32; gens.len()];
    for _ in 0..m {
        let mut cur = 0usize;
        for (j, &g) in gens.iter().enumerate() {
            cur = mul[cur][pow(g, e[j])];
        }
        if coords[cur].is_some() {
            return None; // products collide: not independent
        }
        coords[cur] = Some(e.clone());
        for j in (0..e.len()).rev() {
            e[j] += 1;
            if e[j] < orders[j] {
                break;
            }
            e[j] = 0;
        }
    }
    coords.into_iter().collect()
}
