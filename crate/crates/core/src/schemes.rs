//! Zero-dimensional schemes: fat points kP and (2,3)-points Z(O, L), and the
//! linear conditions they impose on forms of degree d.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Domain, Field};
use crate::forms::{
    falling_factorial, monomial_basis, monomial_value, power_table, proportional, DenseForm,
    MonomialBasis, MonomialIndex, ProjPoint,
};
use crate::params::binomial;

/// How many times `random_scheme` redraws a point before giving up.
const MAX_DRAWS: usize = 64;

/// The shape of one component, without its support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    /// kP for k in {2, 3, 4}.
    Fat(u32),
    /// Z(O, L).
    TwoThree,
}

impl ComponentKind {
    pub const DOUBLE: Self = Self::Fat(2);
    pub const TRIPLE: Self = Self::Fat(3);
    pub const QUADRUPLE: Self = Self::Fat(4);

    /// Length of the component in P^m.
    pub fn degree(&self, m: usize) -> usize {
        match self {
            Self::Fat(k) => binomial(m as u64 + *k as u64 - 1, m as u64) as usize,
            Self::TwoThree => 2 * m + 1,
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fat(k) => write!(f, "{k}P"),
            Self::TwoThree => write!(f, "Z23"),
        }
    }
}

impl FromStr for ComponentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2P" => Ok(Self::Fat(2)),
            "3P" => Ok(Self::Fat(3)),
            "4P" => Ok(Self::Fat(4)),
            "Z23" | "Z" => Ok(Self::TwoThree),
            other => Err(Error::InvalidParams(format!(
                "unknown scheme component {other:?} (expected 2P, 3P, 4P or Z23)"
            ))),
        }
    }
}

impl Serialize for ComponentKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ComponentKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma separated component list such as `"Z23,2P*6"` or `"4P, 2P x 3"`.
pub fn parse_scheme_spec(spec: &str) -> Result<Vec<ComponentKind>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (kind, count) = match item.split_once(['*', 'x']) {
            Some((k, n)) => {
                let n: usize = n.trim().parse().map_err(|_| {
                    Error::InvalidParams(format!("bad repetition count in {item:?}"))
                })?;
                (k, n)
            }
            None => (item, 1),
        };
        let kind: ComponentKind = kind.parse()?;
        out.extend(std::iter::repeat_n(kind, count));
    }
    Ok(out)
}

/// Total length of a component list in P^m.
pub fn spec_degree(kinds: &[ComponentKind], m: usize) -> usize {
    kinds.iter().map(|k| k.degree(m)).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatPoint<E> {
    pub point: ProjPoint<E>,
    pub multiplicity: u32,
}

impl<E: Clone> FatPoint<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, point: ProjPoint<E>, multiplicity: u32) -> Result<Self> {
        if !(2..=4).contains(&multiplicity) {
            return Err(Error::InvalidParams(format!(
                "fat point multiplicity must be 2, 3 or 4, got {multiplicity}"
            )));
        }
        if point.is_zero(field) {
            return Err(Error::Degenerate("zero coordinate vector".into()));
        }
        Ok(Self {
            point,
            multiplicity,
        })
    }
}

/// Z(O, L) with L the line spanned by O and the direction `direction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoThreePoint<E> {
    pub base: ProjPoint<E>,
    pub direction: Vec<E>,
}

impl<E: Clone> TwoThreePoint<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, base: ProjPoint<E>, direction: Vec<E>) -> Result<Self> {
        if direction.len() != base.nvars() {
            return Err(Error::InvalidParams("direction has wrong length".into()));
        }
        if base.is_zero(field) || proportional(field, base.coords(), &direction) {
            return Err(Error::Degenerate(
                "the line of a (2,3)-point needs a direction independent of its base point".into(),
            ));
        }
        Ok(Self { base, direction })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component<E> {
    Fat(FatPoint<E>),
    TwoThree(TwoThreePoint<E>),
}

impl<E: Clone> Component<E> {
    pub fn support(&self) -> &ProjPoint<E> {
        match self {
            Self::Fat(f) => &f.point,
            Self::TwoThree(z) => &z.base,
        }
    }

    pub fn kind(&self) -> ComponentKind {
        match self {
            Self::Fat(f) => ComponentKind::Fat(f.multiplicity),
            Self::TwoThree(_) => ComponentKind::TwoThree,
        }
    }
}

/// A disjoint union of components with pairwise distinct supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeUnion<E> {
    nvars: usize,
    domain: Domain,
    components: Vec<Component<E>>,
}

impl<E: Clone> SchemeUnion<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, nvars: usize, components: Vec<Component<E>>) -> Result<Self> {
        for (i, c) in components.iter().enumerate() {
            if c.support().nvars() != nvars {
                return Err(Error::InvalidParams(format!(
                    "component {i} lives in {} coordinates, expected {nvars}",
                    c.support().nvars()
                )));
            }
            for prev in &components[..i] {
                if prev.support().same_point(field, c.support()) {
                    return Err(Error::Degenerate(format!("component {i} repeats a support point")));
                }
            }
        }
        Ok(Self {
            nvars,
            domain: field.domain(),
            components,
        })
    }

    pub fn empty<F: Field<Elem = E>>(field: &F, nvars: usize) -> Self {
        Self {
            nvars,
            domain: field.domain(),
            components: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Dimension m of the ambient P^m.
    pub fn ambient_dim(&self) -> usize {
        self.nvars - 1
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn components(&self) -> &[Component<E>] {
        &self.components
    }

    pub fn kinds(&self) -> Vec<ComponentKind> {
        self.components.iter().map(Component::kind).collect()
    }

    pub fn degree(&self) -> usize {
        scheme_degree(self)
    }
}

pub fn scheme_degree<E: Clone>(s: &SchemeUnion<E>) -> usize {
    spec_degree(&s.kinds(), s.ambient_dim())
}

/// Which derivative a functional takes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSpec<E> {
    /// The mixed partial by a multi-index.
    Mixed(MonomialIndex),
    /// d_u d_{x_i}.
    Directional { direction: Vec<E>, coordinate: usize },
}

/// F -> (derivative of F)(point).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Functional<E> {
    pub point: ProjPoint<E>,
    pub spec: DerivativeSpec<E>,
}

impl<E: Clone> Functional<E> {
    /// Values of the functional on every monomial of `basis`.
    pub fn row<F: Field<Elem = E>>(&self, field: &F, basis: &MonomialBasis) -> Vec<E> {
        let powers = power_table(field, self.point.coords(), basis.degree());
        let n = basis.nvars();
        let mut shifted = vec![0u32; n];
        let mut value = |mono: &[u32], alpha: &[u32]| -> E {
            if mono.iter().zip(alpha).any(|(c, a)| c < a) {
                return field.zero();
            }
            for k in 0..n {
                shifted[k] = mono[k] - alpha[k];
            }
            let c = field.from_u64(falling_factorial(mono, alpha));
            field.mul(&c, &monomial_value(field, &powers, &shifted))
        };
        match &self.spec {
            DerivativeSpec::Mixed(alpha) => basis
                .monomials()
                .iter()
                .map(|mono| value(&mono.0, &alpha.0))
                .collect(),
            DerivativeSpec::Directional {
                direction,
                coordinate,
            } => {
                let mut alpha = vec![0u32; n];
                basis
                    .monomials()
                    .iter()
                    .map(|mono| {
                        let mut acc = field.zero();
                        for (j, uj) in direction.iter().enumerate() {
                            if field.is_zero(uj) {
                                continue;
                            }
                            alpha.iter_mut().for_each(|a| *a = 0);
                            alpha[*coordinate] += 1;
                            alpha[j] += 1;
                            acc = field.add(&acc, &field.mul(uj, &value(&mono.0, &alpha)));
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    pub fn apply<F: Field<Elem = E>>(&self, field: &F, form: &DenseForm<E>) -> E {
        let row = self.row(field, &form.basis());
        row.iter()
            .zip(form.coeffs())
            .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
    }
}

/// The functionals whose common kernel in degree `d` is H^0(I_S(d)).
///
/// kP contributes every partial of order k-1 at P. Z(O, L) contributes the
/// first partials at O and the m+1 second derivatives d_w d_{x_i} at O; these
/// rows have rank 2m+1 because of the Euler relation.
pub fn conditions<F: Field>(field: &F, s: &SchemeUnion<F::Elem>, d: u32) -> Result<Vec<Functional<F::Elem>>> {
    if d < 3 {
        return Err(Error::InvalidParams(format!("conditions need d >= 3, got {d}")));
    }
    if s.domain() != field.domain() {
        return Err(Error::DomainMismatch {
            scheme: s.domain(),
            requested: field.domain(),
        });
    }
    let m = s.ambient_dim();
    let mut out = Vec::new();
    for c in s.components() {
        match c {
            Component::Fat(fp) => {
                for alpha in monomial_basis(m, fp.multiplicity - 1) {
                    out.push(Functional {
                        point: fp.point.clone(),
                        spec: DerivativeSpec::Mixed(alpha),
                    });
                }
            }
            Component::TwoThree(z) => {
                for i in 0..=m {
                    out.push(Functional {
                        point: z.base.clone(),
                        spec: DerivativeSpec::Mixed(MonomialIndex::unit(m + 1, i)),
                    });
                }
                for i in 0..=m {
                    out.push(Functional {
                        point: z.base.clone(),
                        spec: DerivativeSpec::Directional {
                            direction: z.direction.clone(),
                            coordinate: i,
                        },
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The apolarity pairing <F, G> = sum_a a! f_a g_a. For G = L^d it equals
/// d! F(l), so the hyperplane of F contains [G] iff the pairing vanishes.
pub fn apolar_pairing<F: Field>(field: &F, f: &DenseForm<F::Elem>, g: &DenseForm<F::Elem>) -> F::Elem {
    assert_eq!((f.nvars(), f.degree()), (g.nvars(), g.degree()));
    let basis = f.basis();
    let mut acc = field.zero();
    for ((mono, a), b) in basis.monomials().iter().zip(f.coeffs()).zip(g.coeffs()) {
        if field.is_zero(a) || field.is_zero(b) {
            continue;
        }
        let fact: u64 = mono.0.iter().map(|&e| (1..=e as u64).product::<u64>()).product();
        acc = field.add(&acc, &field.mul(&field.from_u64(fact), &field.mul(a, b)));
    }
    acc
}

fn draw_point<F: Field, R: rand::Rng>(
    field: &F,
    nvars: usize,
    taken: &[ProjPoint<F::Elem>],
    rng: &mut R,
) -> Result<ProjPoint<F::Elem>> {
    for _ in 0..MAX_DRAWS {
        let p = ProjPoint((0..nvars).map(|_| field.random(rng)).collect());
        if p.is_zero(field) || taken.iter().any(|q| q.same_point(field, &p)) {
            continue;
        }
        return Ok(p);
    }
    Err(Error::Distinctness(MAX_DRAWS))
}

/// A union of the requested component kinds with independent random supports
/// in P^m. Deterministic in `seed`.
pub fn random_scheme<F: Field>(
    field: &F,
    kinds: &[ComponentKind],
    m: usize,
    seed: u64,
) -> Result<SchemeUnion<F::Elem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nvars = m + 1;
    let mut supports = Vec::with_capacity(kinds.len());
    let mut components = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let p = draw_point(field, nvars, &supports, &mut rng)?;
        supports.push(p.clone());
        let c = match *kind {
            ComponentKind::Fat(k) => Component::Fat(FatPoint::new(field, p, k)?),
            ComponentKind::TwoThree => {
                let mut direction = None;
                for _ in 0..MAX_DRAWS {
                    let w: Vec<F::Elem> = (0..nvars).map(|_| field.random(&mut rng)).collect();
                    if !proportional(field, p.coords(), &w) {
                        direction = Some(w);
                        break;
                    }
                }
                let w = direction.ok_or(Error::Distinctness(MAX_DRAWS))?;
                Component::TwoThree(TwoThreePoint::new(field, p, w)?)
            }
        };
        components.push(c);
    }
    SchemeUnion::new(field, nvars, components)
}
