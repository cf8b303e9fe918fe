//! The product system of a free flow: time shifts on the full Fock module
//! over L²(ℝ₊, F).
//!
//! Exponential units of this system are parametrized by truncated families
//! ζ = (ζⁿ)_{n} of F^{⊙n}-valued step functions of n-1 nonnegative arguments.
//! Their components at a time tuple are assembled through the unique
//! decomposition of the tuple into leader-led subtuples, and their inner
//! products resum to the closed exponential series
//!
//!   ⟨ξ_t^ζ, b·ξ_t^{ζ'}⟩ = 1·b-term + Σ_m (tᵐ/m!)·Oᵐ(b),
//!
//! with O(c) = ⟨ζ, c·ζ'⟩ the exact overlap superoperator. Functions are
//! restricted to finite indicator sums with elementary tensor coefficients,
//! which makes every overlap integral exact.

use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::bimodule::{
    canonicalize, elementary_inner, BMatrix, Bimodule, GeneratorPresentation, ModuleVector,
};
use crate::error::{Error, Result};
use crate::superop::SuperOperator;

/// A tuple (t_n, …, t_1) of strictly positive times, leftmost entry first.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTuple(Vec<f64>);

impl TimeTuple {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidTimeTuple("tuple must be nonempty".into()));
        }
        if entries.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidTimeTuple(
                "tuple entries must be strictly positive and finite".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The decomposition of a tuple into subtuples led by their leftmost entry:
/// within a subtuple every entry is at least the leader, and the leaders
/// strictly decrease from the left subtuple to the right one.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleDecomposition {
    subtuples: Vec<Vec<f64>>,
    /// Starting offset of each subtuple in the original tuple, for exact
    /// integer replay of the segmentation.
    offsets: Vec<usize>,
}

impl TupleDecomposition {
    pub fn subtuples(&self) -> &[Vec<f64>] {
        &self.subtuples
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Whether this segmentation satisfies the leader conditions and
    /// reproduces `entries` on concatenation.
    pub fn is_valid_for(&self, entries: &[f64]) -> bool {
        let concat: Vec<f64> = self.subtuples.iter().flatten().copied().collect();
        if concat != entries {
            return false;
        }
        for sub in &self.subtuples {
            let Some(&leader) = sub.first() else {
                return false;
            };
            if sub.iter().any(|&s| s < leader) {
                return false;
            }
        }
        self.subtuples.windows(2).all(|w| w[0][0] > w[1][0])
    }

    /// "[3][1 2 2 1]"-style rendering.
    pub fn bracket_string(&self) -> String {
        self.subtuples
            .iter()
            .map(|sub| {
                let inner = sub
                    .iter()
                    .map(|s| format!("{s}"))
                    .collect::<Vec<_>>()
                    .join(" ");
                format!("[{inner}]")
            })
            .collect::<Vec<_>>()
            .join("")
    }
}

/// Greedy left-to-right segmentation: the current leader is the leftmost
/// remaining entry; its subtuple extends while entries stay ≥ the leader
/// (ties stay with the leader); a strictly smaller entry starts the next
/// subtuple. The result is the unique valid decomposition.
pub fn decompose(tuple: &TimeTuple) -> TupleDecomposition {
    decompose_slice(tuple.entries())
}

pub(crate) fn decompose_slice(entries: &[f64]) -> TupleDecomposition {
    let mut subtuples = Vec::new();
    let mut offsets = Vec::new();
    let mut i = 0;
    while i < entries.len() {
        let leader = entries[i];
        let mut j = i + 1;
        while j < entries.len() && entries[j] >= leader {
            j += 1;
        }
        subtuples.push(entries[i..j].to_vec());
        offsets.push(i);
        i = j;
    }
    TupleDecomposition { subtuples, offsets }
}

// ----- symbolic tensor elements --------------------------------------------

/// A finite sum of elementary tensors x_n ⊙ … ⊙ x_1 over a common module,
/// kept symbolically (leftmost factor first). All inner products fold through
/// the factors, so no tensor power is ever materialized.
#[derive(Debug, Clone)]
pub struct TensorElement {
    order: usize,
    terms: Vec<Vec<ModuleVector>>,
}

impl TensorElement {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            terms: Vec::new(),
        }
    }

    pub fn elementary(factors: Vec<ModuleVector>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Precondition(
                "elementary tensor needs at least one factor".into(),
            ));
        }
        Ok(Self {
            order: factors.len(),
            terms: vec![factors],
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[Vec<ModuleVector>] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self {
            order: self.order,
            terms,
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    f[0] = f[0].scale(z);
                    f
                })
                .collect(),
        }
    }

    /// Tensor product by concatenation of factors (distributing sums).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut f = a.clone();
                f.extend(b.iter().cloned());
                terms.push(f);
            }
        }
        Self {
            order: self.order + other.order,
            terms,
        }
    }

    /// ⟨self, b·other⟩ in F^{⊙order}, folded exactly.
    pub fn inner(
        &self,
        module: &Bimodule,
        b: &AlgebraElement,
        other: &Self,
    ) -> Result<AlgebraElement> {
        if self.order != other.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        let mut acc = AlgebraElement::zero(module.algebra());
        for x in &self.terms {
            for y in &other.terms {
                acc = acc.add(&elementary_inner(module, x, b, y)?);
            }
        }
        Ok(acc)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn norm(&self, module: &Bimodule) -> Result<f64> {
        let g = self.inner(module, &module.algebra().unit(), self)?;
        Ok(g.operator_norm().max(0.0).sqrt())
    }
}

// ----- free units -----------------------------------------------------------

/// One indicator term of the n-particle component of a free unit parameter:
/// the function 𝕀_{I_{n-1}}(s_{n-1})···𝕀_{I_1}(s_1)·(x_n ⊙ … ⊙ x_1) on
/// ℝ₊^{n-1}, with intervals listed leftmost argument first.
#[derive(Debug, Clone)]
pub struct IndicatorTerm {
    pub intervals: Vec<(f64, f64)>,
    pub factors: Vec<ModuleVector>,
}

/// A truncated free-unit parameter ζ = (ζ¹, …, ζ^N), each component a finite
/// sum of indicator terms.
#[derive(Debug, Clone)]
pub struct FreeUnitParam {
    module: Bimodule,
    /// components[n-1] holds the terms of ζⁿ.
    components: Vec<Vec<IndicatorTerm>>,
}

impl FreeUnitParam {
    pub fn new(module: &Bimodule, components: Vec<Vec<IndicatorTerm>>) -> Result<Self> {
        for (i, comp) in components.iter().enumerate() {
            let n = i + 1;
            for term in comp {
                if term.factors.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: term.factors.len(),
                    });
                }
                if term.intervals.len() != n - 1 {
                    return Err(Error::DimensionMismatch {
                        expected: n - 1,
                        found: term.intervals.len(),
                    });
                }
                for f in &term.factors {
                    module.check_vector(f)?;
                }
                for &(a, b) in &term.intervals {
                    if !(a >= 0.0 && b > a && b.is_finite()) {
                        return Err(Error::InvalidDescriptor(format!(
                            "indicator interval [{a}, {b}) must have finite positive length"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            module: module.clone(),
            components,
        })
    }

    pub fn zero(module: &Bimodule, max_particles: usize) -> Self {
        Self {
            module: module.clone(),
            components: vec![Vec::new(); max_particles],
        }
    }

    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn max_particles(&self) -> usize {
        self.components.len()
    }

    pub fn component_terms(&self, n: usize) -> &[IndicatorTerm] {
        &self.components[n - 1]
    }

    /// ζ scaled by a complex number (each term's coefficient scales).
    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            module: self.module.clone(),
            components: self
                .components
                .iter()
                .map(|terms| {
                    terms
                        .iter()
                        .map(|t| {
                            let mut factors = t.factors.clone();
                            factors[0] = factors[0].scale(z);
                            IndicatorTerm {
                                intervals: t.intervals.clone(),
                                factors,
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// ζⁿ evaluated at the (n-1)-tuple of arguments (leftmost first).
    fn eval_component(&self, n: usize, args: &[f64]) -> TensorElement {
        let mut acc = TensorElement::zero(n);
        if n > self.components.len() {
            return acc;
        }
        'terms: for term in &self.components[n - 1] {
            for (&s, &(a, b)) in args.iter().zip(&term.intervals) {
                if !(a <= s && s < b) {
                    continue 'terms;
                }
            }
            acc = acc
                .add(&TensorElement::elementary(term.factors.clone()).expect("n ≥ 1"))
                .expect("orders match");
        }
        acc
    }
}

/// Value of a unit component: either a genuine element of F^{⊙n} or the
/// structural zero forced by the horizon indicator 𝕀_{[0,t)}(t_n). Structural
/// zeros are distinguished from numerically zero values in reports.
#[derive(Debug, Clone)]
pub enum ComponentValue {
    StructuralZero,
    Value(TensorElement),
}

impl ComponentValue {
    pub fn tensor_or_zero(&self, order: usize) -> TensorElement {
        match self {
            ComponentValue::StructuralZero => TensorElement::zero(order),
            ComponentValue::Value(v) => v.clone(),
        }
    }

    pub fn is_structural_zero(&self) -> bool {
        matches!(self, ComponentValue::StructuralZero)
    }
}

/// The n-particle component ξ_t^n(t_n, …, t_1) of the free exponential unit
/// of ζ: decompose the tuple into leader-led subtuples, evaluate ζ^{k_ℓ} at
/// the leader-shifted arguments of each subtuple, and tensor the results in
/// order.
pub fn free_unit_component(
    zeta: &FreeUnitParam,
    t: f64,
    tuple: &TimeTuple,
) -> Result<ComponentValue> {
    component_on_entries(zeta, t, tuple.entries())
}

pub(crate) fn component_on_entries(
    zeta: &FreeUnitParam,
    t: f64,
    entries: &[f64],
) -> Result<ComponentValue> {
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    if entries.is_empty() {
        return Err(Error::InvalidTimeTuple("tuple must be nonempty".into()));
    }
    if entries.iter().any(|&s| s < 0.0) {
        return Err(Error::InvalidTimeTuple("tuple entries must be ≥ 0".into()));
    }
    if entries[0] >= t {
        return Ok(ComponentValue::StructuralZero);
    }
    let decomposition = decompose_slice(entries);
    let mut value: Option<TensorElement> = None;
    for sub in decomposition.subtuples() {
        let leader = sub[0];
        let args: Vec<f64> = sub[1..].iter().map(|&s| s - leader).collect();
        let part = zeta.eval_component(sub.len(), &args);
        value = Some(match value {
            None => part,
            Some(v) => v.tensor(&part),
        });
    }
    Ok(ComponentValue::Value(value.expect("nonempty tuple")))
}

/// The overlap superoperator O(c) = Σ_{n≤N} ∫ ⟨ζⁿ(s), c·ζ'ⁿ(s)⟩ ds, computed
/// exactly from interval intersections.
pub fn overlap_superop(
    zeta: &FreeUnitParam,
    zeta2: &FreeUnitParam,
    max_particles: usize,
) -> Result<SuperOperator> {
    if zeta.module != zeta2.module {
        return Err(Error::Precondition(
            "free unit parameters live over different modules".into(),
        ));
    }
    let module = zeta.module.clone();
    let algebra = module.algebra().clone();
    // collect (weight, factors, factors') triples once
    let mut pairs: Vec<(f64, Vec<ModuleVector>, Vec<ModuleVector>)> = Vec::new();
    for n in 1..=max_particles {
        if n > zeta.components.len() || n > zeta2.components.len() {
            continue;
        }
        for a in &zeta.components[n - 1] {
            for b in &zeta2.components[n - 1] {
                let mut w = 1.0;
                for (&(a0, a1), &(b0, b1)) in a.intervals.iter().zip(&b.intervals) {
                    w *= (a1.min(b1) - a0.max(b0)).max(0.0);
                }
                if w > 0.0 {
                    pairs.push((w, a.factors.clone(), b.factors.clone()));
                }
            }
        }
    }
    let closure_algebra = algebra.clone();
    Ok(SuperOperator::from_fn(&algebra, move |c| {
        let mut acc = AlgebraElement::zero(&closure_algebra);
        for (w, xs, ys) in &pairs {
            acc = acc.add(
                &elementary_inner(&module, xs, c, ys)
                    .expect("factors validated")
                    .scale(Complex64::new(*w, 0.0)),
            );
        }
        acc
    }))
}

/// Closed-form inner product ⟨ξ_t^ζ, b·ξ_t^{ζ'}⟩ = b + Σ_m (tᵐ/m!)·Oᵐ(b),
/// summed to machine tail. Equals the time-ordered inner product of the
/// exponential units (0, ζ), (0, ζ') over the (truncated) index module.
pub fn free_inner_closed(
    zeta: &FreeUnitParam,
    zeta2: &FreeUnitParam,
    b: &AlgebraElement,
    t: f64,
    max_particles: usize,
) -> Result<AlgebraElement> {
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    let o = overlap_superop(zeta, zeta2, max_particles)?;
    let mut acc = b.clone();
    let mut cur = b.clone();
    let mut weight = 1.0f64;
    for m in 1..=300usize {
        cur = o.apply(&cur);
        weight *= t / m as f64;
        let term = cur.scale(Complex64::new(weight, 0.0));
        acc = acc.add(&term);
        if term.operator_norm() <= 1e-16 * acc.operator_norm().max(1.0) {
            break;
        }
    }
    Ok(acc)
}

/// Midpoint quadrature of the resummed iterated integral: the outer ordered
/// simplex of multiplicity m is counted through the strictly decreasing
/// tuples of grid midpoints (the inner unbounded integrals are exact overlap
/// integrals, so only the simplex volume is discretized):
///
///   b + Σ_m #\{decreasing m-tuples\}·hᵐ·Oᵐ(b).
///
/// The outer multiplicity is truncated once tᵐ/m! falls below 1e-14.
pub fn free_inner_quadrature(
    zeta: &FreeUnitParam,
    zeta2: &FreeUnitParam,
    b: &AlgebraElement,
    t: f64,
    max_particles: usize,
    h: f64,
) -> Result<AlgebraElement> {
    if !(t > 0.0) {
        return Err(Error::InvalidTime(t));
    }
    if !(h > 0.0) {
        return Err(Error::Precondition(
            "quadrature step must be positive".into(),
        ));
    }
    if max_particles == 0 {
        return Err(Error::Precondition(
            "particle truncation must be ≥ 1".into(),
        ));
    }
    let o = overlap_superop(zeta, zeta2, max_particles)?;
    // number of midpoints (k+1/2)h < t
    let mut g = 0usize;
    while (g as f64 + 0.5) * h < t {
        g += 1;
    }
    let mut acc = b.clone();
    let mut cur = b.clone();
    let mut volume = 1.0f64; // C(G,m)·hᵐ, built incrementally
    let mut tm_over_mfact = 1.0f64;
    for m in 1..=300usize {
        if m > g {
            break;
        }
        cur = o.apply(&cur);
        volume *= (g - m + 1) as f64 * h / m as f64;
        tm_over_mfact *= t / m as f64;
        acc = acc.add(&cur.scale(Complex64::new(volume, 0.0)));
        if tm_over_mfact < 1e-14 {
            break;
        }
    }
    Ok(acc)
}

// ----- the truncated index module ------------------------------------------

/// Placement of the grid/particle symbols inside the free index module.
#[derive(Debug, Clone)]
pub struct FreeIndexLayout {
    grid: Vec<f64>,
    max_particles: usize,
    base_rank: usize,
    /// start of the symbol block for each n (1-based; entry n-1).
    offsets: Vec<usize>,
    /// per-n symbol counts: cells^{n-1}·k_F^n.
    counts: Vec<usize>,
}

impl FreeIndexLayout {
    pub fn cells(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn symbol_count(&self) -> usize {
        self.offsets
            .last()
            .map(|o| o + self.counts.last().unwrap())
            .unwrap_or(0)
    }

    pub fn count_for(&self, n: usize) -> usize {
        self.counts[n - 1]
    }

    fn cell_of(&self, a: f64, b: f64) -> Result<Vec<usize>> {
        // the cells of the grid covering [a, b); endpoints must sit on grid
        // boundaries
        let find = |x: f64| -> Result<usize> {
            self.grid
                .iter()
                .position(|&gp| (gp - x).abs() <= 1e-9)
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "interval endpoint {x} does not lie on the index grid"
                    ))
                })
        };
        let (i, j) = (find(a)?, find(b)?);
        if j <= i {
            return Err(Error::Precondition("empty interval on the grid".into()));
        }
        Ok((i..j).collect())
    }

    fn symbol_index(&self, n: usize, cell_tuple: &[usize], gen_tuple: &[usize]) -> usize {
        let cells = self.cells();
        let k = self.base_rank;
        let mut c_idx = 0usize;
        for &c in cell_tuple {
            c_idx = c_idx * cells + c;
        }
        let mut g_idx = 0usize;
        for &g in gen_tuple {
            g_idx = g_idx * k + g;
        }
        self.offsets[n - 1] + c_idx * k.pow(n as u32) + g_idx
    }
}

/// The truncated index module of a free flow: for each n ≤ N the step
/// functions on the grid with values in F^{⊙n}, with overlap-integral inner
/// product, packaged as a single module with its left action.
#[derive(Debug, Clone)]
pub struct FreeIndexModule {
    pub module: Bimodule,
    images: Vec<ModuleVector>,
    layout: FreeIndexLayout,
    base: Bimodule,
}

/// Builds the truncated index ⊕_{n≤N} (grid step functions valued in F^{⊙n}).
pub fn free_index(base: &Bimodule, grid: &[f64], max_particles: usize) -> Result<FreeIndexModule> {
    if grid.len() < 2 {
        return Err(Error::Precondition(
            "index grid needs at least one cell".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] < 0.0 {
        return Err(Error::Precondition(
            "index grid must be strictly increasing and nonnegative".into(),
        ));
    }
    if max_particles == 0 {
        return Err(Error::Precondition(
            "particle truncation must be ≥ 1".into(),
        ));
    }
    let algebra = base.algebra().clone();
    let k = base.rank();
    let cells = grid.len() - 1;
    let mut offsets = Vec::new();
    let mut counts = Vec::new();
    let mut total = 0usize;
    for n in 1..=max_particles {
        offsets.push(total);
        let c = cells.pow((n - 1) as u32) * k.pow(n as u32);
        counts.push(c);
        total += c;
    }
    let layout = FreeIndexLayout {
        grid: grid.to_vec(),
        max_particles,
        base_rank: k,
        offsets,
        counts,
    };

    let generators: Vec<ModuleVector> = (0..k).map(|i| base.generator(i)).collect();
    let lengths: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();

    // enumerate symbols per n: cell tuples × generator tuples, lexicographic
    let enumerate_tuples = |count: usize, radix: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..count {
            let mut next = Vec::with_capacity(out.len() * radix);
            for t in &out {
                for v in 0..radix {
                    let mut t2 = t.clone();
                    t2.push(v);
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    };

    let n_sym = layout.symbol_count();
    let mut gram = BMatrix::zero(&algebra, n_sym);
    let mut action = vec![BMatrix::zero(&algebra, n_sym); algebra.dim()];

    for n in 1..=max_particles {
        let cell_tuples = enumerate_tuples(n - 1, cells);
        let gen_tuples = enumerate_tuples(n, k);
        for ct in &cell_tuples {
            let vol: f64 = ct.iter().map(|&c| lengths[c]).product();
            for gt in &gen_tuples {
                let row = layout.symbol_index(n, ct, gt);
                let row_factors: Vec<ModuleVector> =
                    gt.iter().map(|&g| generators[g].clone()).collect();
                // Gram: diagonal in (n, cell tuple), overlap volume times
                // the folded inner product of the generator tuples
                for gt2 in &gen_tuples {
                    let col = layout.symbol_index(n, ct, gt2);
                    let col_factors: Vec<ModuleVector> =
                        gt2.iter().map(|&g| generators[g].clone()).collect();
                    let ip = elementary_inner(base, &row_factors, &algebra.unit(), &col_factors)?;
                    gram.set(row, col, ip.scale(Complex64::new(vol, 0.0)));
                }
                // left action: expand u_p·(e_{g_0} ⊙ …) over generator tuples
                for p in 0..algebra.dim() {
                    let expansion = left_expand(base, &algebra.basis_element(p), gt, &generators)?;
                    for (gt2, coeff) in expansion {
                        let target = layout.symbol_index(n, ct, &gt2);
                        let prev = action[p].get(target, row).clone();
                        action[p].set(target, row, prev.add(&coeff));
                    }
                }
            }
        }
    }

    let canonical = canonicalize(&GeneratorPresentation {
        algebra,
        gram,
        action,
    })?;
    Ok(FreeIndexModule {
        module: canonical.module,
        images: canonical.images,
        layout,
        base: base.clone(),
    })
}

/// Expands b·(e_{g_0} ⊙ e_{g_1} ⊙ …) over generator tuples with right
/// coefficients in B, pushing the left multiplier through the factors.
fn left_expand(
    base: &Bimodule,
    b: &AlgebraElement,
    gens: &[usize],
    generators: &[ModuleVector],
) -> Result<Vec<(Vec<usize>, AlgebraElement)>> {
    let moved = base.left_mul(b, &generators[gens[0]])?;
    let mut out = Vec::new();
    for (a, coeff) in moved.coords().iter().enumerate() {
        if coeff.operator_norm() <= 1e-15 {
            continue;
        }
        if gens.len() == 1 {
            out.push((vec![a], coeff.clone()));
        } else {
            for (tail, c) in left_expand(base, coeff, &gens[1..], generators)? {
                let mut idx = Vec::with_capacity(gens.len());
                idx.push(a);
                idx.extend(tail);
                out.push((idx, c));
            }
        }
    }
    Ok(out)
}

impl FreeIndexModule {
    pub fn layout(&self) -> &FreeIndexLayout {
        &self.layout
    }

    /// Realizes a free unit parameter as a vector of the index module. Every
    /// interval of ζ must be a union of grid cells.
    pub fn realize(&self, zeta: &FreeUnitParam) -> Result<ModuleVector> {
        if zeta.module() != &self.base {
            return Err(Error::Precondition(
                "free unit parameter lives over a different base module".into(),
            ));
        }
        if zeta.max_particles() > self.layout.max_particles {
            return Err(Error::Precondition(format!(
                "parameter has components up to n = {}, index truncated at {}",
                zeta.max_particles(),
                self.layout.max_particles
            )));
        }
        let mut acc = self.module.zero_vector();
        for n in 1..=zeta.max_particles() {
            for term in zeta.component_terms(n) {
                // split each interval into covered cells
                let mut cell_axes: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
                for &(a, b) in &term.intervals {
                    cell_axes.push(self.layout.cell_of(a, b)?);
                }
                // expand the factors over the generator basis
                let expansion = expand_elementary(&self.base, &term.factors)?;
                // all combinations of cells across the axes
                let mut cell_tuples: Vec<Vec<usize>> = vec![vec![]];
                for axis in &cell_axes {
                    let mut next = Vec::with_capacity(cell_tuples.len() * axis.len());
                    for t in &cell_tuples {
                        for &c in axis {
                            let mut t2 = t.clone();
                            t2.push(c);
                            next.push(t2);
                        }
                    }
                    cell_tuples = next;
                }
                for ct in &cell_tuples {
                    for (gt, coeff) in &expansion {
                        let idx = self.layout.symbol_index(n, ct, gt);
                        acc = acc.add(&self.module.right_mul(&self.images[idx], coeff)?);
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Expands an elementary tensor v_0 ⊙ v_1 ⊙ … over generator tuples with
/// right coefficients in B.
fn expand_elementary(
    base: &Bimodule,
    factors: &[ModuleVector],
) -> Result<Vec<(Vec<usize>, AlgebraElement)>> {
    let first = &factors[0];
    let mut out = Vec::new();
    for (a, coeff) in first.coords().iter().enumerate() {
        if coeff.operator_norm() <= 1e-15 {
            continue;
        }
        if factors.len() == 1 {
            out.push((vec![a], coeff.clone()));
        } else {
            // v_0 ⊙ rest = Σ_a e_a ⊙ (x_a·rest): push x_a into the next factor
            let mut rest: Vec<ModuleVector> = factors[1..].to_vec();
            rest[0] = base.left_mul(coeff, &rest[0])?;
            for (tail, c) in expand_elementary(base, &rest)? {
                let mut idx = Vec::with_capacity(factors.len());
                idx.push(a);
                idx.extend(tail);
                out.push((idx, c));
            }
        }
    }
    Ok(out)
}

/// Checks the unit recursion at a split horizon: the component of ξ^ζ at
/// horizon s+t equals the unique nonvanishing term shift_t(ξ_s^k) ⊙ ξ_t^{n-k}.
/// Returns the residual and the number of structurally admissible k.
pub fn unit_recursion_residual(
    zeta: &FreeUnitParam,
    s: f64,
    t: f64,
    tuple: &TimeTuple,
) -> Result<(f64, usize)> {
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::InvalidTime(s.min(t)));
    }
    let entries = tuple.entries();
    let n = entries.len();
    let lhs = component_on_entries(zeta, s + t, entries)?.tensor_or_zero(n);
    let mut total = TensorElement::zero(n);
    let mut admissible = 0usize;
    for k in 0..=n {
        // left block: the k leftmost entries, shifted down by t, feeds ξ_s^k;
        // right block: the remaining n-k entries feeds ξ_t^{n-k}
        let left_ok = entries[..k].iter().all(|&x| x >= t);
        let right_ok = k == n || entries[k] < t;
        if !(left_ok && right_ok) {
            continue;
        }
        let left = if k == 0 {
            None
        } else {
            let shifted: Vec<f64> = entries[..k].iter().map(|&x| x - t).collect();
            Some(component_on_entries(zeta, s, &shifted)?)
        };
        let right = if k == n {
            None
        } else {
            Some(component_on_entries(zeta, t, &entries[k..])?)
        };
        if left
            .as_ref()
            .map(|v| v.is_structural_zero())
            .unwrap_or(false)
            || right
                .as_ref()
                .map(|v| v.is_structural_zero())
                .unwrap_or(false)
        {
            continue;
        }
        admissible += 1;
        let term = match (left, right) {
            (None, Some(r)) => r.tensor_or_zero(n),
            (Some(l), None) => l.tensor_or_zero(n),
            (Some(l), Some(r)) => l.tensor_or_zero(k).tensor(&r.tensor_or_zero(n - k)),
            (None, None) => unreachable!("n ≥ 1"),
        };
        total = total.add(&term)?;
    }
    // Probe-based residual: the defect lies in the span of the terms of the
    // two sides, so probing with exactly those terms is a complete test. It
    // is also linear in the defect, unlike ‖x-y‖² = ⟨x,x⟩-2Re⟨x,y⟩+⟨y,y⟩,
    // whose cancellation noise floors at √ε.
    let module = zeta.module();
    let one = module.algebra().unit();
    let mut residual = 0.0f64;
    for probe in lhs.terms().iter().chain(total.terms()) {
        let u = TensorElement::elementary(probe.clone())?;
        let a = u.inner(module, &one, &lhs)?;
        let b = u.inner(module, &one, &total)?;
        residual = residual.max(a.distance(&b));
    }
    Ok((residual, admissible))
}

/// Brute-force segmentation oracle: enumerates all 2^{n-1} segmentations of
/// the tuple and returns those satisfying the leader conditions. Test-grade;
/// exponential in the tuple length.
pub fn enumerate_valid_segmentations(entries: &[f64]) -> Vec<TupleDecomposition> {
    let n = entries.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    // bit i of mask set = a cut after position i
    for mask in 0u64..(1u64 << (n - 1)) {
        let mut subtuples = Vec::new();
        let mut offsets = Vec::new();
        let mut start = 0usize;
        for i in 0..n {
            let cut = i == n - 1 || (mask >> i) & 1 == 1;
            if cut {
                subtuples.push(entries[start..=i].to_vec());
                offsets.push(start);
                start = i + 1;
            }
        }
        let cand = TupleDecomposition { subtuples, offsets };
        if cand.is_valid_for(entries) {
            out.push(cand);
        }
    }
    out
}
