//! Finite desk-scale models of measurable cocycles σ: Γ×X → PSL(n,C).
//!
//! Γ is handled through a presentation (named 2×2 matrices plus relators) and
//! words; it is never enumerated. X is a finite weighted Γ-set, so every
//! almost-everywhere statement of the theory becomes an exact finite check.
//! Cocycles are tables (generator, point) → PSL(n,C) validated against the
//! relators through the cocycle rule
//!
//! ```text
//! σ(g₁g₂, x) = σ(g₁, g₂x)·σ(g₂, x),      σ(g⁻¹, x) = σ(g, g⁻¹x)⁻¹.
//! ```

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::projflag::{block_flag, veronese, CompleteFlag, GroupElement, ProjPoint};

/// Every relator of a presentation must be projectively the identity within
/// this tolerance (the generators are exact input data).
pub const PRESENTATION_RELATOR_TOL: f64 = 1e-9;

/// Cocycle tables are accepted when every relator word evaluates projectively
/// to the identity at every point within this tolerance. Looser than the
/// presentation tolerance because table entries are typically images under
/// π_n and twists, which accumulate rounding.
pub const COCYCLE_RELATOR_TOL: f64 = 1e-7;

/// One letter of a word: a named generator or its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub gen: String,
    pub inverse: bool,
}

/// A word in the generators of a presentation, e.g. `"a b^-1 a^2"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word {
            letters: Vec::new(),
        }
    }

    /// Parse a whitespace-separated word. Each token is a generator name
    /// optionally followed by an integer exponent: `a`, `b^-1`, `a^3`.
    pub fn parse(text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                None => (token, 1i64),
                Some((name, e)) => {
                    let exp: i64 = e.parse().map_err(|_| {
                        Error::InvalidInput(format!("bad exponent in word token {token:?}"))
                    })?;
                    (name, exp)
                }
            };
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::InvalidInput(format!(
                    "bad generator name in word token {token:?}"
                )));
            }
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter {
                    gen: name.to_string(),
                    inverse: exp < 0,
                });
            }
        }
        Ok(Word { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other` (self acts after other).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                if l.inverse {
                    format!("{}^-1", l.gen)
                } else {
                    l.gen.clone()
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A finitely presented discrete subgroup Γ ≤ PSL(2,C): named generator
/// matrices plus relator words, each verified projectively at construction.
#[derive(Clone, Debug)]
pub struct GroupPresentation {
    names: Vec<String>,
    generators: Vec<GroupElement>,
    relators: Vec<Word>,
    index: HashMap<String, usize>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<(String, GroupElement)>, relators: Vec<Word>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput(
                "presentation needs at least one generator".into(),
            ));
        }
        let mut index = HashMap::new();
        let mut names = Vec::new();
        let mut mats = Vec::new();
        for (name, g) in generators {
            if g.n() != 2 {
                return Err(Error::InvalidInput(format!(
                    "generator {name:?} must be 2x2, got {0}x{0}",
                    g.n()
                )));
            }
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate generator name {name:?}"
                )));
            }
            names.push(name);
            mats.push(g);
        }
        let p = GroupPresentation {
            names,
            generators: mats,
            relators: Vec::new(),
            index,
        };
        for r in &relators {
            let m = p.evaluate_word(r)?;
            let residual = m.proj_distance(&GroupElement::identity(2));
            if residual > PRESENTATION_RELATOR_TOL {
                return Err(Error::RelatorViolation {
                    relator: r.to_string(),
                    residual,
                    point: None,
                });
            }
        }
        Ok(GroupPresentation { relators, ..p })
    }

    /// The figure-eight knot group ⟨a, b | a b⁻¹ a⁻¹ b a b⁻¹ a b a⁻¹ b⁻¹⟩
    /// with its discrete faithful parabolic representation
    /// a = [[1,1],[0,1]], b = [[1,0],[−ω,1]], ω = e^{2πi/3}. The relator is
    /// re-verified at construction like any other presentation.
    pub fn figure_eight() -> GroupPresentation {
        let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let a = GroupElement::new(DMatrix::from_row_slice(2, 2, &[one, one, zero, one]))
            .expect("unipotent matrix is invertible");
        let b = GroupElement::new(DMatrix::from_row_slice(2, 2, &[one, zero, -omega, one]))
            .expect("unipotent matrix is invertible");
        let relator =
            Word::parse("a b^-1 a^-1 b a b^-1 a b a^-1 b^-1").expect("relator literal parses");
        GroupPresentation::new(vec![("a".into(), a), ("b".into(), b)], vec![relator])
            .expect("figure-eight relator holds for omega = e^{2 pi i/3}")
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn generator(&self, name: &str) -> Result<&GroupElement> {
        Ok(&self.generators[self.generator_index(name)?])
    }

    pub fn generator_at(&self, i: usize) -> &GroupElement {
        &self.generators[i]
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// The element of Γ represented by `w` (plain left-to-right product).
    pub fn evaluate_word(&self, w: &Word) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(2);
        for l in w.letters() {
            let g = self.generator(&l.gen)?;
            let m = if l.inverse { g.inverse()? } else { g.clone() };
            acc = &acc * &m;
        }
        Ok(acc)
    }
}

/// A finite weighted Γ-set: named points with positive probability weights
/// and one measure-preserving permutation per generator, under which every
/// relator acts as the identity permutation (exactly, in integers).
#[derive(Clone, Debug)]
pub struct FiniteGammaSpace {
    names: Vec<String>,
    weights: Vec<f64>,
    perms: Vec<Vec<usize>>,
    inv_perms: Vec<Vec<usize>>,
    gen_names: Vec<String>,
    gen_index: HashMap<String, usize>,
}

impl FiniteGammaSpace {
    pub fn new(
        presentation: &GroupPresentation,
        names: Vec<String>,
        weights: Vec<f64>,
        perms: Vec<(String, Vec<usize>)>,
    ) -> Result<Self> {
        let k = names.len();
        if k == 0 || weights.len() != k {
            return Err(Error::InvalidInput(
                "space needs matching nonempty point and weight lists".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput(
                "all point weights must be positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "point weights must sum to 1, got {total}"
            )));
        }

        let mut by_gen: HashMap<String, Vec<usize>> = HashMap::new();
        for (name, p) in perms {
            presentation.generator_index(&name)?;
            if by_gen.insert(name.clone(), p).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate action entry for generator {name:?}"
                )));
            }
        }
        let mut perm_list = Vec::new();
        let mut inv_list = Vec::new();
        for gname in presentation.generator_names() {
            let p = by_gen.remove(gname).ok_or_else(|| {
                Error::InvalidInput(format!("action missing for generator {gname:?}"))
            })?;
            if p.len() != k {
                return Err(Error::InvalidInput(format!(
                    "action for {gname:?} has length {}, expected {k}",
                    p.len()
                )));
            }
            let mut inv = vec![usize::MAX; k];
            for (i, &j) in p.iter().enumerate() {
                if j >= k || inv[j] != usize::MAX {
                    return Err(Error::InvalidInput(format!(
                        "action for {gname:?} is not a permutation"
                    )));
                }
                inv[j] = i;
                if (weights[i] - weights[j]).abs() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "action for {gname:?} does not preserve the measure at point {}",
                        names[i]
                    )));
                }
            }
            perm_list.push(p);
            inv_list.push(inv);
        }

        let space = FiniteGammaSpace {
            names,
            weights,
            perms: perm_list,
            inv_perms: inv_list,
            gen_names: presentation.generator_names().to_vec(),
            gen_index: presentation
                .generator_names()
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), i))
                .collect(),
        };
        for r in presentation.relators() {
            for x in 0..k {
                let y = space.apply_word(r, x)?;
                if y != x {
                    return Err(Error::RelatorViolation {
                        relator: r.to_string(),
                        residual: 1.0,
                        point: Some(space.names[x].clone()),
                    });
                }
            }
        }
        Ok(space)
    }

    /// The one-point space (Γ acting trivially): cocycles over it are plain
    /// representations.
    pub fn single_point(presentation: &GroupPresentation) -> FiniteGammaSpace {
        let perms = presentation
            .generator_names()
            .iter()
            .map(|n| (n.clone(), vec![0]))
            .collect();
        FiniteGammaSpace::new(presentation, vec!["x0".into()], vec![1.0], perms)
            .expect("one-point space is always valid")
    }

    /// Γ acting on Z/k through per-generator shifts (the action through a
    /// finite cyclic quotient). Requires every relator to have zero total
    /// shift mod k; weights are uniform.
    pub fn cyclic(
        presentation: &GroupPresentation,
        k: usize,
        shifts: &[i64],
    ) -> Result<FiniteGammaSpace> {
        if k == 0 || shifts.len() != presentation.generator_count() {
            return Err(Error::InvalidInput(
                "cyclic space needs k >= 1 and one shift per generator".into(),
            ));
        }
        let names = (0..k).map(|i| format!("x{i}")).collect();
        let weights = vec![1.0 / k as f64; k];
        let perms = presentation
            .generator_names()
            .iter()
            .zip(shifts)
            .map(|(name, &s)| {
                let s = s.rem_euclid(k as i64) as usize;
                (name.clone(), (0..k).map(|i| (i + s) % k).collect())
            })
            .collect();
        FiniteGammaSpace::new(presentation, names, weights, perms)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn point_name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn point_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown point {name:?}")))
    }

    fn gen_idx(&self, name: &str) -> Result<usize> {
        self.gen_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// `γ·x` for a generator γ.
    pub fn apply_gen(&self, name: &str, x: usize) -> Result<usize> {
        Ok(self.perms[self.gen_idx(name)?][x])
    }

    /// `γ⁻¹·x` for a generator γ.
    pub fn apply_gen_inv(&self, name: &str, x: usize) -> Result<usize> {
        Ok(self.inv_perms[self.gen_idx(name)?][x])
    }

    /// `w·x` for a word (letters act right to left).
    pub fn apply_word(&self, w: &Word, x: usize) -> Result<usize> {
        let mut cur = x;
        for l in w.letters().iter().rev() {
            cur = if l.inverse {
                self.apply_gen_inv(&l.gen, cur)?
            } else {
                self.apply_gen(&l.gen, cur)?
            };
        }
        Ok(cur)
    }

    pub fn generator_names(&self) -> &[String] {
        &self.gen_names
    }
}

/// A measurable map f: X → PSL(n,C), total on the finite space.
#[derive(Clone, Debug)]
pub struct TwistMap {
    elems: Vec<GroupElement>,
}

impl TwistMap {
    pub fn new(elems: Vec<GroupElement>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::InvalidInput(
                "twist map needs at least one point".into(),
            ));
        }
        let n = elems[0].n();
        if elems.iter().any(|g| g.n() != n) {
            return Err(Error::DimensionMismatch(
                "twist map mixes matrix dimensions".into(),
            ));
        }
        Ok(TwistMap { elems })
    }

    pub fn identity(len: usize, n: usize) -> Self {
        TwistMap {
            elems: vec![GroupElement::identity(n); len],
        }
    }

    /// Random well-conditioned twist: independent Gaussian PSL(n,C) elements
    /// with condition number at most `cond_cap`.
    pub fn random<R: Rng>(rng: &mut R, len: usize, n: usize, cond_cap: f64) -> Self {
        TwistMap {
            elems: (0..len)
                .map(|_| GroupElement::random_gaussian(rng, n, cond_cap))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn n(&self) -> usize {
        self.elems[0].n()
    }

    pub fn get(&self, x: usize) -> &GroupElement {
        &self.elems[x]
    }

    /// The pointwise inverse map x ↦ f(x)⁻¹.
    pub fn pointwise_inverse(&self) -> Result<TwistMap> {
        let elems = self
            .elems
            .iter()
            .map(|g| g.inverse())
            .collect::<Result<Vec<_>>>()?;
        Ok(TwistMap { elems })
    }

    /// The pointwise complex conjugate map x ↦ f̄(x); conjugating a twisted
    /// cocycle conjugates its twist.
    pub fn conjugated(&self) -> TwistMap {
        TwistMap {
            elems: self.elems.iter().map(|g| g.conjugated()).collect(),
        }
    }
}

/// A finite measurable cocycle σ: Γ×X → PSL(n,C), stored as one n×n element
/// per (generator, point) and extended to all of Γ by the cocycle rule.
#[derive(Clone, Debug)]
pub struct Cocycle {
    n: usize,
    presentation: Arc<GroupPresentation>,
    space: Arc<FiniteGammaSpace>,
    table: Vec<Vec<GroupElement>>,
}

impl Cocycle {
    /// Validates shape and relator consistency: for every relator r and point
    /// x, σ(r, x) must be projectively the identity within
    /// [`COCYCLE_RELATOR_TOL`].
    pub fn new(
        presentation: Arc<GroupPresentation>,
        space: Arc<FiniteGammaSpace>,
        table: Vec<Vec<GroupElement>>,
    ) -> Result<Self> {
        if table.len() != presentation.generator_count() {
            return Err(Error::InvalidInput(format!(
                "cocycle table has {} generator rows, presentation has {}",
                table.len(),
                presentation.generator_count()
            )));
        }
        if table.iter().any(|row| row.len() != space.len()) {
            return Err(Error::InvalidInput(
                "cocycle table rows must have one entry per point".into(),
            ));
        }
        let n = table[0][0].n();
        if table.iter().flatten().any(|g| g.n() != n) {
            return Err(Error::DimensionMismatch(
                "cocycle table mixes matrix dimensions".into(),
            ));
        }
        let c = Cocycle {
            n,
            presentation,
            space,
            table,
        };
        let id = GroupElement::identity(n);
        for r in c.presentation.relators() {
            for x in 0..c.space.len() {
                let m = c.evaluate_word(r, x)?;
                let residual = m.proj_distance(&id);
                if residual > COCYCLE_RELATOR_TOL {
                    return Err(Error::RelatorViolation {
                        relator: r.to_string(),
                        residual,
                        point: Some(c.space.point_name(x).to_string()),
                    });
                }
            }
        }
        Ok(c)
    }

    /// The cocycle σ_ρ(γ, x) := ρ(γ) associated to a representation
    /// (constant in x). `rho` is aligned with the presentation's generator
    /// order.
    pub fn from_representation(
        presentation: Arc<GroupPresentation>,
        space: Arc<FiniteGammaSpace>,
        rho: Vec<GroupElement>,
    ) -> Result<Cocycle> {
        if rho.len() != presentation.generator_count() {
            return Err(Error::InvalidInput(
                "representation needs one matrix per generator".into(),
            ));
        }
        let table = rho.into_iter().map(|g| vec![g; space.len()]).collect();
        Cocycle::new(presentation, space, table)
    }

    /// σ_{π_n∘ρ} where ρ is the presentation's own 2×2 holonomy.
    pub fn from_sym_power(
        presentation: Arc<GroupPresentation>,
        space: Arc<FiniteGammaSpace>,
        n: usize,
    ) -> Result<Cocycle> {
        let rho = presentation
            .generator_names()
            .iter()
            .map(|name| crate::projflag::sym_power(presentation.generator(name)?, n))
            .collect::<Result<Vec<_>>>()?;
        Cocycle::from_representation(presentation, space, rho)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn presentation(&self) -> &Arc<GroupPresentation> {
        &self.presentation
    }

    pub fn space(&self) -> &Arc<FiniteGammaSpace> {
        &self.space
    }

    /// Table entry σ(γ_i, x).
    pub fn entry(&self, gen: usize, x: usize) -> &GroupElement {
        &self.table[gen][x]
    }

    /// σ(w, x) by the cocycle rule, composing letters right to left:
    /// σ(g₁g₂, x) = σ(g₁, g₂x)·σ(g₂, x) and σ(g⁻¹, x) = σ(g, g⁻¹x)⁻¹.
    pub fn evaluate_word(&self, w: &Word, x: usize) -> Result<GroupElement> {
        let mut acc = GroupElement::identity(self.n);
        let mut cur = x;
        for l in w.letters().iter().rev() {
            let gi = self.presentation.generator_index(&l.gen)?;
            if l.inverse {
                let prev = self.space.apply_gen_inv(&l.gen, cur)?;
                acc = &self.table[gi][prev].inverse()? * &acc;
                cur = prev;
            } else {
                acc = &self.table[gi][cur] * &acc;
                cur = self.space.apply_gen(&l.gen, cur)?;
            }
        }
        Ok(acc)
    }

    /// The twisted cocycle σ^f(γ, x) = f(γx)⁻¹·σ(γ, x)·f(x). Relator
    /// consistency is preserved algebraically and re-checked.
    pub fn twist(&self, f: &TwistMap) -> Result<Cocycle> {
        if f.len() != self.space.len() {
            return Err(Error::DimensionMismatch(
                "twist map must cover every point of X".into(),
            ));
        }
        if f.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "twist map dimension {} does not match cocycle dimension {}",
                f.n(),
                self.n
            )));
        }
        let mut table = Vec::with_capacity(self.table.len());
        for (gi, gname) in self.presentation.generator_names().iter().enumerate() {
            let mut row = Vec::with_capacity(self.space.len());
            for x in 0..self.space.len() {
                let gx = self.space.apply_gen(gname, x)?;
                row.push(&(&f.get(gx).inverse()? * &self.table[gi][x]) * f.get(x));
            }
            table.push(row);
        }
        Cocycle::new(self.presentation.clone(), self.space.clone(), table)
    }

    /// The complex-conjugate cocycle σ̄.
    pub fn conjugated(&self) -> Cocycle {
        Cocycle {
            n: self.n,
            presentation: self.presentation.clone(),
            space: self.space.clone(),
            table: self
                .table
                .iter()
                .map(|row| row.iter().map(|g| g.conjugated()).collect())
                .collect(),
        }
    }
}

/// One sampled value of a boundary map: the flag φ(ξ, x).
#[derive(Clone, Debug)]
pub struct TableEntry {
    pub xi: ProjPoint,
    pub x: usize,
    pub flag: CompleteFlag,
}

/// A σ-equivariant boundary map φ: P¹(C)×X → F(n,C), realized either in
/// closed form (Veronese embeddings, possibly twisted per point or assembled
/// block-diagonally) or as a finite sampled table.
#[derive(Clone, Debug)]
pub enum BoundaryMap {
    /// φ(ξ, x) = V_n(ξ), conjugated entrywise when `conjugate` is set.
    Veronese { n: usize, conjugate: bool },
    /// φ(ξ, x) = f(x)⁻¹·V_n(ξ) (twisted; `conjugate` conjugates the Veronese
    /// factor, pairing with conjugated-then-twisted cocycles).
    TwistedVeronese { twist: TwistMap, conjugate: bool },
    /// φ(ξ, x) = block_flag(V_{n₁}(ξ), …, V_{n_r}(ξ)).
    Block { sizes: Vec<usize> },
    /// Finitely many sampled values; evaluation looks ξ up projectively.
    Table { entries: Vec<TableEntry> },
}

impl BoundaryMap {
    /// Ambient flag dimension n.
    pub fn n(&self) -> Result<usize> {
        match self {
            BoundaryMap::Veronese { n, .. } => Ok(*n),
            BoundaryMap::TwistedVeronese { twist, .. } => Ok(twist.n()),
            BoundaryMap::Block { sizes } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    return Err(Error::InvalidInput(
                        "block boundary map needs positive block sizes".into(),
                    ));
                }
                Ok(sizes.iter().sum())
            }
            BoundaryMap::Table { entries } => entries
                .first()
                .map(|e| e.flag.n())
                .ok_or_else(|| Error::InvalidInput("empty boundary-map table".into())),
        }
    }

    /// Whether φ(ξ, x) is independent of x (closed form, untwisted). The
    /// integration over X then collapses to a single evaluation.
    pub fn x_independent(&self) -> bool {
        matches!(
            self,
            BoundaryMap::Veronese { .. } | BoundaryMap::Block { .. }
        )
    }

    /// Evaluate φ(ξ, x). Sampled tables only answer at sampled pairs
    /// (projective match of ξ within 1e-9 chordal distance).
    pub fn eval(&self, xi: &ProjPoint, x: usize) -> Result<CompleteFlag> {
        match self {
            BoundaryMap::Veronese { n, conjugate } => {
                let f = veronese(xi, *n);
                Ok(if *conjugate { f.conjugated() } else { f })
            }
            BoundaryMap::TwistedVeronese { twist, conjugate } => {
                if x >= twist.len() {
                    return Err(Error::InvalidInput(format!(
                        "point index {x} out of range for twist map of length {}",
                        twist.len()
                    )));
                }
                let base = veronese(xi, twist.n());
                let base = if *conjugate { base.conjugated() } else { base };
                base.apply(&twist.get(x).inverse()?)
            }
            BoundaryMap::Block { sizes } => {
                self.n()?;
                let components: Vec<CompleteFlag> =
                    sizes.iter().map(|&s| veronese(xi, s)).collect();
                block_flag(&components)
            }
            BoundaryMap::Table { entries } => {
                let mut best: Option<(f64, &TableEntry)> = None;
                for e in entries {
                    if e.x != x {
                        continue;
                    }
                    let d = e.xi.chordal_distance(xi);
                    if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                        best = Some((d, e));
                    }
                }
                match best {
                    Some((d, e)) if d < 1e-9 => Ok(e.flag.clone()),
                    _ => Err(Error::InvalidInput(format!(
                        "boundary-map table has no sample at the requested point (x = {x})"
                    ))),
                }
            }
        }
    }

    /// Maximum flag distance between φ(γξ, γx) and σ(γ, x)·φ(ξ, x) over
    /// sampled triples (γ generator, ξ, x).
    ///
    /// Closed-form maps draw ξ from the Fubini-Study measure; sampled tables
    /// are checked exhaustively over all table pairs whose γ-images resolve
    /// (capped at `samples` by a seeded subset).
    pub fn check_equivariance(&self, sigma: &Cocycle, samples: usize, seed: u64) -> Result<f64> {
        if samples == 0 {
            return Err(Error::InvalidInput(
                "equivariance check needs at least one sample".into(),
            ));
        }
        if self.n()? != sigma.n() {
            return Err(Error::DimensionMismatch(format!(
                "boundary map dimension {} does not match cocycle dimension {}",
                self.n()?,
                sigma.n()
            )));
        }
        let pres = sigma.presentation();
        let space = sigma.space();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;

        if let BoundaryMap::Table { entries } = self {
            for e in entries {
                if e.x >= space.len() {
                    return Err(Error::InvalidInput(format!(
                        "boundary-map table references point index {} outside X",
                        e.x
                    )));
                }
            }
            let mut pairs = Vec::new();
            for ei in 0..entries.len() {
                for gi in 0..pres.generator_count() {
                    pairs.push((ei, gi));
                }
            }
            if pairs.len() > samples {
                // Deterministic subset, biased toward nothing in particular.
                let mut keep = Vec::with_capacity(samples);
                for _ in 0..samples {
                    keep.push(pairs.remove(rng.gen_range(0..pairs.len())));
                }
                pairs = keep;
            }
            let mut resolved = 0usize;
            for (ei, gi) in pairs {
                let e = &entries[ei];
                let gname = &pres.generator_names()[gi];
                let gxi = e.xi.apply_mobius(pres.generator_at(gi));
                let gx = space.apply_gen(gname, e.x)?;
                let Ok(lhs) = self.eval(&gxi, gx) else {
                    continue; // image not sampled; skip this pair
                };
                let rhs = e.flag.apply(sigma.entry(gi, e.x))?;
                worst = worst.max(lhs.distance(&rhs));
                resolved += 1;
            }
            if resolved == 0 {
                return Err(Error::InvalidInput(
                    "boundary-map table is not closed under any generator; nothing to check".into(),
                ));
            }
            return Ok(worst);
        }

        for _ in 0..samples {
            let gi = rng.gen_range(0..pres.generator_count());
            let gname = &pres.generator_names()[gi];
            let x = rng.gen_range(0..space.len());
            let xi = ProjPoint::random_fubini_study(&mut rng);
            let gxi = xi.apply_mobius(pres.generator_at(gi));
            let gx = space.apply_gen(gname, x)?;
            let lhs = self.eval(&gxi, gx)?;
            let rhs = self.eval(&xi, x)?.apply(sigma.entry(gi, x))?;
            worst = worst.max(lhs.distance(&rhs));
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projflag::sym_power;
    use rand::SeedableRng;

    fn fig8() -> (Arc<GroupPresentation>, Arc<FiniteGammaSpace>) {
        let p = Arc::new(GroupPresentation::figure_eight());
        let x = Arc::new(FiniteGammaSpace::cyclic(&p, 5, &[1, 1]).unwrap());
        (p, x)
    }

    fn random_word<R: Rng>(rng: &mut R, len: usize) -> Word {
        let gens = ["a", "b"];
        let mut text = String::new();
        for _ in 0..len {
            let g = gens[rng.gen_range(0..2)];
            if rng.gen_bool(0.5) {
                text.push_str(&format!("{g} "));
            } else {
                text.push_str(&format!("{g}^-1 "));
            }
        }
        Word::parse(&text).unwrap()
    }

    #[test]
    fn word_parsing() {
        let w = Word::parse("a b^-1 a^2").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.letters()[1].gen, "b");
        assert!(w.letters()[1].inverse);
        assert!(!w.letters()[2].inverse);
        assert_eq!(w.to_string(), "a b^-1 a a");

        assert!(Word::parse("").unwrap().is_empty());
        assert!(Word::parse("a^0 b^0").unwrap().is_empty());
        assert!(Word::parse("a^x").is_err());
        assert!(Word::parse("(ab)").is_err());
    }

    #[test]
    fn figure_eight_relator_holds() {
        let p = GroupPresentation::figure_eight();
        let r = &p.relators()[0];
        let m = p.evaluate_word(r).unwrap();
        assert!(m.proj_distance(&GroupElement::identity(2)) < 1e-12);
    }

    #[test]
    fn figure_eight_with_wrong_omega_is_rejected() {
        // The same matrices with omega = e^{i pi/3} violate the relator.
        let omega = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let a = GroupElement::new(DMatrix::from_row_slice(2, 2, &[one, one, zero, one])).unwrap();
        let b =
            GroupElement::new(DMatrix::from_row_slice(2, 2, &[one, zero, -omega, one])).unwrap();
        let relator = Word::parse("a b^-1 a^-1 b a b^-1 a b a^-1 b^-1").unwrap();
        let err = GroupPresentation::new(vec![("a".into(), a), ("b".into(), b)], vec![relator]);
        assert!(matches!(err, Err(Error::RelatorViolation { .. })));
    }

    #[test]
    fn space_validation() {
        let p = GroupPresentation::figure_eight();
        // Weights not summing to 1.
        let e = FiniteGammaSpace::new(
            &p,
            vec!["u".into(), "v".into()],
            vec![0.5, 0.6],
            vec![("a".into(), vec![1, 0]), ("b".into(), vec![1, 0])],
        );
        assert!(e.is_err());
        // Non-permutation action.
        let e = FiniteGammaSpace::new(
            &p,
            vec!["u".into(), "v".into()],
            vec![0.5, 0.5],
            vec![("a".into(), vec![0, 0]), ("b".into(), vec![1, 0])],
        );
        assert!(e.is_err());
        // Non-measure-preserving action.
        let e = FiniteGammaSpace::new(
            &p,
            vec!["u".into(), "v".into()],
            vec![0.3, 0.7],
            vec![("a".into(), vec![1, 0]), ("b".into(), vec![0, 1])],
        );
        assert!(e.is_err());
        // Valid cyclic space.
        let x = FiniteGammaSpace::cyclic(&p, 5, &[1, 1]).unwrap();
        assert_eq!(x.len(), 5);
        assert_eq!(x.apply_gen("a", 4).unwrap(), 0);
        assert_eq!(x.apply_gen_inv("a", 0).unwrap(), 4);
    }

    #[test]
    fn relator_must_act_trivially_on_space() {
        // Presentation with relator "a^3" over a rotation of order 3; a
        // cyclic space of size 2 with shift 1 violates the relator
        // permutation (3 mod 2 = 1).
        let half = Complex64::new(0.5, 0.0);
        let s = Complex64::new(0.0, 3f64.sqrt() / 2.0);
        let rot = GroupElement::new(DMatrix::from_row_slice(
            2,
            2,
            &[
                half + s,
                Complex64::default(),
                Complex64::default(),
                half - s,
            ],
        ))
        .unwrap();
        let p = GroupPresentation::new(vec![("a".into(), rot)], vec![Word::parse("a^3").unwrap()])
            .unwrap();
        let e = FiniteGammaSpace::cyclic(&p, 2, &[1]);
        assert!(matches!(e, Err(Error::RelatorViolation { .. })));
        assert!(FiniteGammaSpace::cyclic(&p, 3, &[1]).is_ok());
    }

    #[test]
    fn representation_cocycles_validate_for_small_n() {
        let (p, x) = fig8();
        for n in 1..=5 {
            let c = Cocycle::from_sym_power(p.clone(), x.clone(), n).unwrap();
            assert_eq!(c.n(), n);
            // Constant in x.
            let w = Word::parse("a b^-1 a").unwrap();
            let g0 = c.evaluate_word(&w, 0).unwrap();
            for xi in 1..x.len() {
                assert!(g0.proj_eq(&c.evaluate_word(&w, xi).unwrap(), 1e-12));
            }
            // Matches the direct representation product.
            let direct = sym_power(&p.evaluate_word(&w).unwrap(), n).unwrap();
            assert!(g0.proj_eq(&direct, 1e-9));
        }
    }

    #[test]
    fn empty_and_single_letter_words() {
        let (p, x) = fig8();
        let c = Cocycle::from_sym_power(p.clone(), x, 3).unwrap();
        let id = c.evaluate_word(&Word::empty(), 2).unwrap();
        assert!(id.proj_eq(&GroupElement::identity(3), 1e-15));
        let a = c.evaluate_word(&Word::parse("a").unwrap(), 2).unwrap();
        assert!(a.proj_eq(c.entry(0, 2), 1e-15));
        let e = c.evaluate_word(&Word::parse("zz").unwrap(), 0);
        assert!(matches!(e, Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn cocycle_rule_coherence_under_twists() {
        let (p, x) = fig8();
        let base = Cocycle::from_sym_power(p.clone(), x.clone(), 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = TwistMap::random(&mut rng, x.len(), 3, 20.0);
        let c = base.twist(&f).unwrap();

        for _ in 0..40 {
            let lu = rng.gen_range(0..4);
            let lv = rng.gen_range(0..4);
            let u = random_word(&mut rng, lu);
            let v = random_word(&mut rng, lv);
            let xi = rng.gen_range(0..x.len());
            let uv = u.concat(&v);
            let lhs = c.evaluate_word(&uv, xi).unwrap();
            let vx = x.apply_word(&v, xi).unwrap();
            let rhs = &c.evaluate_word(&u, vx).unwrap() * &c.evaluate_word(&v, xi).unwrap();
            assert!(
                lhs.proj_eq(&rhs, 1e-8),
                "cocycle rule broke on u={u}, v={v}, x={xi}: {}",
                lhs.proj_distance(&rhs)
            );
        }

        // (σ^f)(w, x) = f(wx)^{-1} σ(w, x) f(x) for words, not just letters.
        for _ in 0..20 {
            let lw = rng.gen_range(1..6);
            let w = random_word(&mut rng, lw);
            let xi = rng.gen_range(0..x.len());
            let wx = x.apply_word(&w, xi).unwrap();
            let lhs = c.evaluate_word(&w, xi).unwrap();
            let rhs =
                &(&f.get(wx).inverse().unwrap() * &base.evaluate_word(&w, xi).unwrap()) * f.get(xi);
            assert!(lhs.proj_eq(&rhs, 1e-8), "twist chain rule broke on w={w}");
        }
    }

    #[test]
    fn twist_round_trip() {
        let (p, x) = fig8();
        let base = Cocycle::from_sym_power(p, x.clone(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let f = TwistMap::random(&mut rng, x.len(), 2, 20.0);

        let idtwist = TwistMap::identity(x.len(), 2);
        let same = base.twist(&idtwist).unwrap();
        let back = base
            .twist(&f)
            .unwrap()
            .twist(&f.pointwise_inverse().unwrap())
            .unwrap();
        for gi in 0..2 {
            for xi in 0..x.len() {
                assert!(same.entry(gi, xi).proj_eq(base.entry(gi, xi), 1e-12));
                assert!(back.entry(gi, xi).proj_eq(base.entry(gi, xi), 1e-9));
            }
        }
    }

    #[test]
    fn veronese_boundary_is_equivariant() {
        let (p, x) = fig8();
        for n in 2..=4 {
            let c = Cocycle::from_sym_power(p.clone(), x.clone(), n).unwrap();
            let phi = BoundaryMap::Veronese {
                n,
                conjugate: false,
            };
            let res = phi.check_equivariance(&c, 100, 33).unwrap();
            assert!(res < 1e-8, "n={n}: residual {res}");
        }
    }

    #[test]
    fn twisted_boundary_matches_twisted_cocycle() {
        let (p, x) = fig8();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 3;
        let base = Cocycle::from_sym_power(p, x.clone(), n).unwrap();
        let f = TwistMap::random(&mut rng, x.len(), n, 20.0);
        let twisted = base.twist(&f).unwrap();

        let phi = BoundaryMap::TwistedVeronese {
            twist: f,
            conjugate: false,
        };
        let res = phi.check_equivariance(&twisted, 100, 34).unwrap();
        assert!(res < 1e-8, "residual {res}");

        // Against the untwisted cocycle the same map is far from equivariant.
        let bad = phi.check_equivariance(&base, 100, 35).unwrap();
        assert!(bad > 1e-2, "expected gross violation, got {bad}");
    }

    #[test]
    fn conjugated_pair_is_equivariant() {
        let (p, x) = fig8();
        let n = 3;
        let c = Cocycle::from_sym_power(p, x.clone(), n)
            .unwrap()
            .conjugated();
        let phi = BoundaryMap::Veronese { n, conjugate: true };
        let res = phi.check_equivariance(&c, 100, 36).unwrap();
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn block_boundary_is_equivariant() {
        let (p, x) = fig8();
        // sigma = diag(pi_2(rho), pi_1(rho)) for the partition (2,1).
        let mut rho = Vec::new();
        for name in p.generator_names() {
            let g2 = sym_power(p.generator(name).unwrap(), 2).unwrap();
            let mut m = DMatrix::<Complex64>::identity(3, 3);
            m.view_mut((0, 0), (2, 2)).copy_from(g2.matrix());
            rho.push(GroupElement::new(m).unwrap());
        }
        let c = Cocycle::from_representation(p.clone(), x.clone(), rho).unwrap();
        let phi = BoundaryMap::Block { sizes: vec![2, 1] };
        let res = phi.check_equivariance(&c, 100, 37).unwrap();
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn table_boundary_detects_corruption() {
        let (p, x) = fig8();
        let n = 3;
        let c = Cocycle::from_sym_power(p.clone(), x.clone(), n).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let mut entries = Vec::new();
        let mut base_points = Vec::new();
        for _ in 0..3 {
            base_points.push(ProjPoint::random_fubini_study(&mut rng));
        }
        // Base points and their one-step generator images, at every x.
        let mut all_points = base_points.clone();
        for gi in 0..p.generator_count() {
            for b in &base_points {
                all_points.push(b.apply_mobius(p.generator_at(gi)));
            }
        }
        for pt in &all_points {
            for xi in 0..x.len() {
                entries.push(TableEntry {
                    xi: pt.clone(),
                    x: xi,
                    flag: veronese(pt, n),
                });
            }
        }
        let phi = BoundaryMap::Table {
            entries: entries.clone(),
        };
        let res = phi.check_equivariance(&c, 10_000, 39).unwrap();
        assert!(res < 1e-9, "valid table residual {res}");

        // Corrupt one base entry.
        entries[0].flag = CompleteFlag::random_gaussian(&mut rng, n, 50.0);
        let bad = BoundaryMap::Table { entries };
        let res = bad.check_equivariance(&c, 10_000, 39).unwrap();
        assert!(res > 0.1, "corruption went unnoticed: residual {res}");
    }

    #[test]
    fn table_lookup_misses_are_errors() {
        let (_, x) = fig8();
        let pt = ProjPoint::one();
        let phi = BoundaryMap::Table {
            entries: vec![TableEntry {
                xi: pt,
                x: 0,
                flag: veronese(&ProjPoint::one(), 2),
            }],
        };
        assert!(phi.eval(&ProjPoint::one(), 0).is_ok());
        assert!(phi.eval(&ProjPoint::zero(), 0).is_err());
        assert!(phi.eval(&ProjPoint::one(), 1).is_err());
        let _ = x;
    }
}
