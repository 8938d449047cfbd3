//! Deterministic constructors for the groups the checks run on.
//!
//! Matrix groups are turned into permutation groups acting on nonzero
//! vectors (GL, SL, GU, SU, Sp, SO) or on 1-spaces normalized to have first
//! nonzero coordinate 1 (PGL, PSL, PSU, PSp). Generators are taken from a
//! fixed stream of candidate matrices (transvections, diagonal and
//! reflection-type elements), keeping each one that enlarges the group,
//! until the closed-form order of the family is reached.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd};
use crate::error::{cap_check, Error, Result};
use crate::ffmat::{form_transvection, form_value_vanishes, preserves_form, Elem, Field, FormSpec, Matrix};
use crate::group::{Caps, PermGroup};
use crate::perm::Perm;

const MATHIEU: &str = include_str!("../data/mathieu.json");

/// Largest `q^d` for which the vector set is materialized.
const MAX_VECTOR_SPACE: u64 = 1 << 22;

fn one() -> u32 {
    1
}

/// JSON description of a group; this is the CLI's group input format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum GroupSpec {
    Sym { n: usize },
    Alt { n: usize },
    Cyclic { n: usize },
    GL { d: usize, q: u32 },
    SL { d: usize, q: u32 },
    PSL { d: usize, q: u32 },
    PGL { d: usize, q: u32 },
    GU { d: usize, q: u32 },
    SU { d: usize, q: u32 },
    PSU { d: usize, q: u32 },
    Sp { d: usize, q: u32 },
    PSp { d: usize, q: u32 },
    SO { d: usize, q: u32 },
    Wreath { inner: Box<GroupSpec>, m: usize },
    Direct { factors: Vec<GroupSpec> },
    Derived { inner: Box<GroupSpec> },
    AutExt {
        base: Box<GroupSpec>,
        aut: AutTag,
        #[serde(default = "one")]
        power: u32,
    },
    Explicit { name: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutTag {
    Graph,
    Field,
    Diagonal,
}

impl GroupSpec {
    /// Canonical JSON text (sorted keys, no whitespace).
    pub fn canonical_json(&self) -> String {
        // serde_json's default map type keeps keys sorted
        let v = serde_json::to_value(self).expect("spec serializes");
        serde_json::to_string(&v).expect("value serializes")
    }

    pub fn parse(text: &str) -> Result<GroupSpec> {
        serde_json::from_str(text).map_err(|e| Error::BadSpec(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Points,
    Projective,
    Vectors,
    VectorsAndDuals,
}

/// Linear-algebra side of a matrix group: field, form, and the point set.
#[derive(Clone, Debug)]
pub struct Linear {
    pub field: Arc<Field>,
    pub dim: usize,
    pub form: Option<FormSpec>,
    pub projective: bool,
    pub with_duals: bool,
    points: Vec<Vec<Elem>>,
    lookup: Vec<u32>,
}

impl Linear {
    fn new(field: Arc<Field>, dim: usize, form: Option<FormSpec>, projective: bool, with_duals: bool) -> Result<Linear> {
        let q = field.order() as u64;
        let total = q
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_VECTOR_SPACE)
            .ok_or(Error::SizeCapExceeded {
                what: "vector space size",
                value: (q as u128).saturating_pow(dim as u32),
                cap: MAX_VECTOR_SPACE as u128,
            })?;
        let mut points = Vec::new();
        let mut lookup = vec![u32::MAX; total as usize];
        for code in 1..total {
            let v = decode(code, q, dim);
            if projective && v.iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            lookup[code as usize] = points.len() as u32;
            points.push(v);
        }
        Ok(Linear {
            field,
            dim,
            form,
            projective,
            with_duals,
            points,
            lookup,
        })
    }

    /// Number of points of one copy (vectors or 1-spaces).
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn degree(&self) -> usize {
        if self.with_duals {
            2 * self.points.len()
        } else {
            self.points.len()
        }
    }

    pub fn point(&self, i: usize) -> &[Elem] {
        &self.points[i % self.points.len()]
    }

    fn code(&self, v: &[Elem]) -> usize {
        let q = self.field.order() as usize;
        v.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
    }

    fn normalize(&self, mut v: Vec<Elem>) -> Vec<Elem> {
        if self.projective {
            if let Some(&lead) = v.iter().find(|&&c| c != 0) {
                let inv = self.field.inv(lead).expect("nonzero");
                for c in v.iter_mut() {
                    *c = self.field.mul(*c, inv);
                }
            }
        }
        v
    }

    pub fn index_of(&self, v: &[Elem]) -> Option<u32> {
        let idx = self.lookup[self.code(&self.normalize(v.to_vec()))];
        (idx != u32::MAX).then_some(idx)
    }

    /// Permutation induced by `a` (and by `a^{-T}` on the dual copy).
    pub fn perm_of(&self, a: &Matrix) -> Result<Perm> {
        let n = self.points.len();
        let mut images = Vec::with_capacity(self.degree());
        for v in &self.points {
            images.push(self.index_of(&a.apply(v)).ok_or(Error::Singular)?);
        }
        if self.with_duals {
            let dual = a.inv()?.transpose();
            for v in &self.points {
                images.push(n as u32 + self.index_of(&dual.apply(v)).ok_or(Error::Singular)?);
            }
        }
        Perm::from_images(images)
    }

    /// Permutation induced by applying `f` to the coordinates of each point.
    fn perm_of_map<F: Fn(&[Elem]) -> Vec<Elem>>(&self, f: F) -> Result<Perm> {
        let images = self
            .points
            .iter()
            .map(|v| self.index_of(&f(v)).ok_or(Error::Singular))
            .collect::<Result<Vec<u32>>>()?;
        Perm::from_images(images)
    }

    /// The matrix inducing `x`, for actions on vectors.
    pub fn matrix_preimage(&self, x: &Perm) -> Option<Matrix> {
        if self.projective || x.degree() != self.degree() {
            return None;
        }
        let n = self.dim;
        let mut a = Matrix::zero(&self.field, n);
        for c in 0..n {
            let mut e = vec![0; n];
            e[c] = 1;
            let img = x.image(self.index_of(&e)?) as usize;
            if img >= self.points.len() {
                return None;
            }
            for r in 0..n {
                a.set(r, c, self.points[img][r]);
            }
        }
        match self.perm_of(&a) {
            Ok(p) if &p == x => Some(a),
            _ => None,
        }
    }

    fn basis(&self, i: usize) -> Vec<Elem> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }
}

fn decode(mut code: u64, q: u64, dim: usize) -> Vec<Elem> {
    let mut v = vec![0; dim];
    for c in v.iter_mut() {
        *c = (code % q) as Elem;
        code /= q;
    }
    v
}

/// A constructed group with the data needed to interpret its elements.
#[derive(Clone, Debug)]
pub struct GroupMeta {
    pub spec: GroupSpec,
    pub group: Arc<PermGroup>,
    /// Defining characteristic, 0 when not a group of Lie type.
    pub characteristic: u32,
    pub action: Action,
    pub linear: Option<Arc<Linear>>,
    /// Matrices whose images generate the group (classical families only).
    pub gen_matrices: Vec<Matrix>,
    pub graph_automorphism: Option<Perm>,
    pub field_automorphism: Option<Perm>,
    pub wreath: Option<WreathData>,
}

#[derive(Clone, Debug)]
pub struct WreathData {
    pub inner: Arc<PermGroup>,
    pub inner_degree: usize,
    pub copies: usize,
}

impl GroupMeta {
    fn plain(spec: GroupSpec, group: PermGroup, characteristic: u32) -> GroupMeta {
        GroupMeta {
            spec,
            group: Arc::new(group),
            characteristic,
            action: Action::Points,
            linear: None,
            gen_matrices: Vec::new(),
            graph_automorphism: None,
            field_automorphism: None,
            wreath: None,
        }
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    pub fn label(&self) -> String {
        self.spec.canonical_json()
    }

    /// Matrix preimage of a group element, when the action allows it.
    pub fn matrix_preimage(&self, x: &Perm) -> Option<Matrix> {
        self.linear.as_ref()?.matrix_preimage(x)
    }
}

fn prime_power(q: u32) -> Result<(u32, u32)> {
    match factorize(q as u128).as_slice() {
        [(p, k)] => Ok((*p as u32, *k)),
        _ => Err(Error::BadSpec(format!("{q} is not a prime power"))),
    }
}

fn checked_product(factors: impl IntoIterator<Item = u128>) -> Result<u128> {
    factors.into_iter().try_fold(1u128, |acc, f| {
        acc.checked_mul(f).ok_or(Error::SizeCapExceeded {
            what: "group order",
            value: u128::MAX,
            cap: u128::MAX,
        })
    })
}

/// `|GL_d(q)|`.
pub fn gl_order(d: usize, q: u128) -> Result<u128> {
    let qq = q.checked_pow((d * (d - 1) / 2) as u32).ok_or(Error::BadSpec("order overflow".into()))?;
    checked_product(std::iter::once(qq).chain((1..=d as u32).map(|i| q.pow(i) - 1)))
}

/// `|GU_d(q)|`.
pub fn gu_order(d: usize, q: u128) -> Result<u128> {
    let qq = q.checked_pow((d * (d - 1) / 2) as u32).ok_or(Error::BadSpec("order overflow".into()))?;
    checked_product(
        std::iter::once(qq).chain((1..=d as u32).map(|i| if i % 2 == 0 { q.pow(i) - 1 } else { q.pow(i) + 1 })),
    )
}

/// `|Sp_{2n}(q)|`, which is also `|SO_{2n+1}(q)|` for odd `q`.
pub fn sp_order(n: usize, q: u128) -> Result<u128> {
    let qq = q.checked_pow((n * n) as u32).ok_or(Error::BadSpec("order overflow".into()))?;
    checked_product(std::iter::once(qq).chain((1..=n as u32).map(|i| q.pow(2 * i) - 1)))
}

/// Additive `F_p`-basis of the field: `1, ω, …, ω^{k-1}`.
fn additive_basis(f: &Field) -> Vec<Elem> {
    (0..f.k()).map(|s| f.pow(f.primitive(), s as u64)).collect()
}

fn elementary(f: &Arc<Field>, d: usize, i: usize, j: usize, a: Elem) -> Matrix {
    let mut m = Matrix::identity(f, d);
    m.set(i, j, a);
    m
}

fn sl_stream(f: Arc<Field>, d: usize) -> impl Iterator<Item = Matrix> {
    let basis = additive_basis(&f);
    basis.into_iter().flat_map(move |a| {
        let f = f.clone();
        (0..d).flat_map(move |i| {
            let f = f.clone();
            (0..d).filter(move |&j| j != i).map(move |j| elementary(&f, d, i, j, a))
        })
    })
}

fn nonzero_vectors(f: &Field, d: usize) -> impl Iterator<Item = Vec<Elem>> {
    let q = f.order() as u64;
    (1..q.pow(d as u32)).map(move |c| decode(c, q, d))
}

fn symplectic_stream(form: FormSpec) -> impl Iterator<Item = Matrix> {
    let f = form.gram.field().clone();
    let d = form.gram.dim();
    let basis = additive_basis(&f);
    nonzero_vectors(&f, d).flat_map(move |w| {
        let form = form.clone();
        basis.clone().into_iter().map(move |l| form_transvection(&form, &w, l))
    })
}

/// Transvections `v ↦ v + λ (v, w) w` with `w` isotropic and `λ + λ^q = 0`,
/// then a few diagonal and monomial unitary matrices of determinant 1.
fn unitary_stream(form: FormSpec) -> impl Iterator<Item = Matrix> {
    let f = form.gram.field().clone();
    let d = form.gram.dim();
    let q = (f.order() as f64).sqrt().round() as u64;
    let a0 = f
        .elements()
        .find(|&a| a != 0 && f.add(a, f.conj(a)) == 0)
        .expect("trace-zero elements exist");
    // F_p-basis of F_q inside F_{q^2}
    let beta = f.pow(f.primitive(), q + 1);
    let kq = f.k() / 2;
    let lambdas: Vec<Elem> = (0..kq).map(|s| f.mul(a0, f.pow(beta, s as u64))).collect();
    let zeta = f.pow(f.primitive(), q - 1);
    let f2 = f.clone();
    let form2 = form.clone();
    let form3 = form.clone();
    let transvections = nonzero_vectors(&f, d)
        .filter(move |w| form2.eval(w, w) == 0)
        .flat_map(move |w| {
            let form = form.clone();
            lambdas.clone().into_iter().map(move |l| form_transvection(&form, &w, l))
        });
    let mut extras = Vec::new();
    if d >= 2 {
        let mut diag = vec![1; d];
        diag[0] = zeta;
        diag[1] = f2.inv(zeta).unwrap();
        extras.push(Matrix::diag(&f2, &diag));
        let mut mono = Matrix::zero(&f2, d);
        mono.set(0, 1, 1);
        mono.set(1, 0, f2.neg(1));
        for i in 2..d {
            mono.set(i, i, 1);
        }
        extras.push(mono);
    }
    // SU_2(q) blocks [[a, b], [-b̄, ā]] on coordinate pairs
    let f3 = f2.clone();
    let blocks = (0..d).flat_map(move |i| (i + 1..d).map(move |j| (i, j))).flat_map(move |(i, j)| {
        let f = f3.clone();
        let pairs: Vec<(Elem, Elem)> = f
            .elements()
            .flat_map(|a| f.elements().map(move |b| (a, b)))
            .filter(|&(a, b)| f.add(f.mul(a, f.conj(a)), f.mul(b, f.conj(b))) == 1)
            .collect();
        pairs.into_iter().map(move |(a, b)| {
            let mut m = Matrix::identity(&f, d);
            m.set(i, i, a);
            m.set(i, j, b);
            m.set(j, i, f.neg(f.conj(b)));
            m.set(j, j, f.conj(a));
            m
        })
    });
    // exhaustive search, only reached for the few tiny groups (such as
    // SU_3(2)) that the structured candidates do not generate
    let f4 = f2.clone();
    let qq = f4.order() as u64;
    let exhaustive = qq
        .checked_pow((d * d) as u32)
        .filter(|&n| n <= 1 << 20)
        .into_iter()
        .flat_map(move |n| {
            let f = f4.clone();
            let form = form3.clone();
            (0..n).filter_map(move |code| {
                let entries = decode(code, qq, d * d);
                let rows: Vec<Vec<Elem>> = entries.chunks(d).map(|r| r.to_vec()).collect();
                let m = Matrix::from_rows(&f, &rows).ok()?;
                (m.det() == 1 && preserves_form(&m, &form)).then_some(m)
            })
        });
    transvections.chain(extras).chain(blocks).chain(exhaustive)
}

/// Products of two reflections in non-isotropic vectors (identity Gram).
fn orthogonal_stream(f: Arc<Field>, d: usize) -> impl Iterator<Item = Matrix> {
    let form = FormSpec::symmetric(&f, d);
    let vecs: Vec<Vec<Elem>> = nonzero_vectors(&f, d).filter(|w| form.eval(w, w) != 0).collect();
    let refl: Vec<Matrix> = vecs
        .iter()
        .map(|w| {
            let c = f.neg(f.mul(f.from_int(2), f.inv(form.eval(w, w)).unwrap()));
            let mut m = Matrix::identity(&f, d);
            for r in 0..d {
                for s in 0..d {
                    m.set(r, s, f.add(m.get(r, s), f.mul(c, f.mul(w[r], w[s]))));
                }
            }
            m
        })
        .collect();
    let n = refl.len();
    (0..n).flat_map(move |a| {
        let refl = refl.clone();
        (a + 1..n).map(move |b| refl[a].mul(&refl[b]).unwrap())
    })
}

/// Keeps candidates that enlarge the group until the target order.
fn grow(
    linear: &Linear,
    target: u128,
    candidates: impl Iterator<Item = Matrix>,
    caps: Caps,
) -> Result<(PermGroup, Vec<Matrix>)> {
    cap_check("group order", target, caps.max_order)?;
    let degree = linear.degree();
    let mut group = PermGroup::trivial(degree);
    let mut gens = Vec::new();
    let mut mats = Vec::new();
    if target == 1 {
        return Ok((group, mats));
    }
    for m in candidates {
        let p = linear.perm_of(&m)?;
        if group.contains(&p) {
            continue;
        }
        gens.push(p);
        mats.push(m);
        group = PermGroup::with_caps(degree, gens.clone(), caps)?;
        if group.order() >= target {
            break;
        }
    }
    if group.order() != target {
        return Err(Error::Internal(format!(
            "generated order {} differs from the family order {target}",
            group.order()
        )));
    }
    Ok((group, mats))
}

fn classical(spec: &GroupSpec, caps: Caps) -> Result<GroupMeta> {
    use GroupSpec::*;
    let (d, q) = match spec {
        GL { d, q } | SL { d, q } | PSL { d, q } | PGL { d, q } | GU { d, q } | SU { d, q } | PSU { d, q }
        | Sp { d, q } | PSp { d, q } | SO { d, q } => (*d, *q),
        _ => unreachable!(),
    };
    if d < 1 {
        return Err(Error::BadSpec("dimension must be positive".into()));
    }
    let (p, k) = prime_power(q)?;
    let qq = q as u128;
    let unitary = matches!(spec, GU { .. } | SU { .. } | PSU { .. });
    let field = if unitary { Field::new(p, 2 * k)? } else { Field::new(p, k)? };
    let projective = matches!(spec, PSL { .. } | PGL { .. } | PSU { .. } | PSp { .. });
    let form = match spec {
        Sp { .. } | PSp { .. } => Some(FormSpec::symplectic(&field, d)?),
        GU { .. } | SU { .. } | PSU { .. } => Some(FormSpec::hermitian(&field, d)?),
        SO { .. } => {
            if d % 2 == 0 || q % 2 == 0 {
                return Err(Error::BadSpec("SO is implemented for odd dimension and odd q".into()));
            }
            Some(FormSpec::symmetric(&field, d))
        }
        _ => None,
    };
    let linear = Linear::new(field.clone(), d, form.clone(), projective, false)?;
    cap_check("degree", linear.degree() as u128, caps.max_degree as u128)?;
    let g1 = gcd(d as u128, qq - 1);
    let (target, stream): (u128, Box<dyn Iterator<Item = Matrix>>) = match spec {
        GL { .. } | PGL { .. } => {
            let diag = {
                let mut v = vec![1; d];
                v[0] = field.primitive();
                Matrix::diag(&field, &v)
            };
            let order = gl_order(d, qq)?;
            let target = if projective { order / (qq - 1) } else { order };
            (target, Box::new(std::iter::once(diag).chain(sl_stream(field.clone(), d))))
        }
        SL { .. } => (gl_order(d, qq)? / (qq - 1), Box::new(sl_stream(field.clone(), d))),
        PSL { .. } => (gl_order(d, qq)? / (qq - 1) / g1, Box::new(sl_stream(field.clone(), d))),
        Sp { .. } | PSp { .. } => {
            let order = sp_order(d / 2, qq)?;
            let target = if projective { order / gcd(2, qq - 1) } else { order };
            (target, Box::new(symplectic_stream(form.clone().unwrap())))
        }
        GU { .. } => {
            let zeta = field.pow(field.primitive(), (q - 1) as u64);
            let mut v = vec![1; d];
            v[0] = zeta;
            let diag = Matrix::diag(&field, &v);
            (
                gu_order(d, qq)?,
                Box::new(std::iter::once(diag).chain(unitary_stream(form.clone().unwrap()))),
            )
        }
        SU { .. } => (gu_order(d, qq)? / (qq + 1), Box::new(unitary_stream(form.clone().unwrap()))),
        PSU { .. } => (
            gu_order(d, qq)? / (qq + 1) / gcd(d as u128, qq + 1),
            Box::new(unitary_stream(form.clone().unwrap())),
        ),
        SO { .. } => (sp_order(d / 2, qq)?, Box::new(orthogonal_stream(field.clone(), d))),
        _ => unreachable!(),
    };
    let (group, mats) = grow(&linear, target, stream, caps)?;
    if let Some(f) = &form {
        if !mats.iter().all(|m| preserves_form(m, f)) {
            return Err(Error::Internal("generator does not preserve the form".into()));
        }
    }
    Ok(GroupMeta {
        spec: spec.clone(),
        group: Arc::new(group),
        characteristic: p,
        action: if projective { Action::Projective } else { Action::Vectors },
        linear: Some(Arc::new(linear)),
        gen_matrices: mats,
        graph_automorphism: None,
        field_automorphism: None,
        wreath: None,
    })
}

fn embed(x: &Perm, offset: usize, total: usize) -> Perm {
    let mut images: Vec<u32> = (0..total as u32).collect();
    for i in 0..x.degree() {
        images[offset + i] = offset as u32 + x.image(i as u32);
    }
    Perm::from_images(images).expect("embedding is a bijection")
}

#[derive(Deserialize)]
struct ExplicitGroup {
    degree: usize,
    order: String,
    generators: Vec<Perm>,
}

fn explicit(name: &str, caps: Caps) -> Result<PermGroup> {
    let mut all: std::collections::BTreeMap<String, ExplicitGroup> = serde_json::from_str(MATHIEU)?;
    let g = all
        .remove(name)
        .ok_or_else(|| Error::BadSpec(format!("unknown explicit group {name:?}")))?;
    let group = PermGroup::with_caps(g.degree, g.generators, caps)?;
    if group.order().to_string() != g.order {
        return Err(Error::Internal(format!("{name} has order {} not {}", group.order(), g.order)));
    }
    Ok(group)
}

/// Builds the permutation group described by `spec`.
pub fn make_group(spec: &GroupSpec) -> Result<GroupMeta> {
    make_group_with_caps(spec, Caps::default())
}

pub fn make_group_with_caps(spec: &GroupSpec, caps: Caps) -> Result<GroupMeta> {
    use GroupSpec::*;
    let meta = match spec {
        Sym { n } | Alt { n } | Cyclic { n } => {
            let n = *n;
            if n == 0 {
                return Err(Error::BadSpec("degree must be positive".into()));
            }
            cap_check("degree", n as u128, caps.max_degree as u128)?;
            let all: Vec<u32> = (0..n as u32).collect();
            let cyc = |c: &[u32]| Perm::from_cycles(n, &[c]).unwrap();
            let (gens, order): (Vec<Perm>, u128) = match spec {
                Sym { .. } => (
                    if n >= 2 { vec![cyc(&[0, 1]), cyc(&all)] } else { vec![] },
                    checked_product((1..=n as u128).collect::<Vec<_>>())?,
                ),
                Alt { .. } => (
                    (2..n as u32).map(|k| cyc(&[0, 1, k])).collect(),
                    checked_product((1..=n as u128).collect::<Vec<_>>())? / if n >= 2 { 2 } else { 1 },
                ),
                _ => (vec![cyc(&all)], n as u128),
            };
            cap_check("group order", order, caps.max_order)?;
            let g = PermGroup::with_caps(n, gens, caps)?;
            if g.order() != order {
                return Err(Error::Internal("symmetric-type order mismatch".into()));
            }
            GroupMeta::plain(spec.clone(), g, 0)
        }
        GL { .. } | SL { .. } | PSL { .. } | PGL { .. } | GU { .. } | SU { .. } | PSU { .. } | Sp { .. }
        | PSp { .. } | SO { .. } => classical(spec, caps)?,
        Wreath { inner, m } => {
            let m = *m;
            if m < 1 {
                return Err(Error::BadSpec("wreath needs at least one copy".into()));
            }
            let inner_meta = make_group_with_caps(inner, caps)?;
            let l = inner_meta.group.clone();
            let n = l.degree();
            let total = n * m;
            cap_check("degree", total as u128, caps.max_degree as u128)?;
            let order = checked_product(std::iter::repeat(l.order()).take(m).chain([m as u128]))?;
            cap_check("group order", order, caps.max_order)?;
            let mut gens: Vec<Perm> = l.generators().iter().map(|g| embed(g, 0, total)).collect();
            if m > 1 {
                let shift: Vec<u32> = (0..total).map(|i| ((i + n) % total) as u32).collect();
                gens.push(Perm::from_images(shift)?);
            }
            let g = PermGroup::with_caps(total, gens, caps)?;
            if g.order() != order {
                return Err(Error::Internal("wreath product order mismatch".into()));
            }
            let mut meta = GroupMeta::plain(spec.clone(), g, inner_meta.characteristic);
            meta.wreath = Some(WreathData {
                inner: l,
                inner_degree: n,
                copies: m,
            });
            meta
        }
        Direct { factors } => {
            if factors.is_empty() {
                return Err(Error::BadSpec("direct product needs factors".into()));
            }
            let metas = factors
                .iter()
                .map(|f| make_group_with_caps(f, caps))
                .collect::<Result<Vec<_>>>()?;
            let total: usize = metas.iter().map(|m| m.group.degree()).sum();
            cap_check("degree", total as u128, caps.max_degree as u128)?;
            let order = checked_product(metas.iter().map(|m| m.order()))?;
            cap_check("group order", order, caps.max_order)?;
            let mut gens = Vec::new();
            let mut offset = 0;
            for m in &metas {
                gens.extend(m.group.generators().iter().map(|g| embed(g, offset, total)));
                offset += m.group.degree();
            }
            let g = PermGroup::with_caps(total, gens, caps)?;
            if g.order() != order {
                return Err(Error::Internal("direct product order mismatch".into()));
            }
            let c = metas[0].characteristic;
            let ch = if metas.iter().all(|m| m.characteristic == c) { c } else { 0 };
            GroupMeta::plain(spec.clone(), g, ch)
        }
        Derived { inner } => {
            let mut meta = make_group_with_caps(inner, caps)?;
            let d = meta.group.derived_subgroup()?;
            meta.spec = spec.clone();
            meta.group = Arc::new(d);
            meta.gen_matrices = Vec::new();
            meta
        }
        AutExt { base, aut, power } => aut_extension(spec, base, *aut, *power, caps)?,
        Explicit { name } => GroupMeta::plain(spec.clone(), explicit(name, caps)?, 0),
    };
    Ok(meta)
}

fn aut_extension(spec: &GroupSpec, base: &GroupSpec, aut: AutTag, power: u32, caps: Caps) -> Result<GroupMeta> {
    match aut {
        AutTag::Graph => {
            let GroupSpec::GL { d, .. } = *base else {
                return Err(Error::BadSpec("graph automorphism is implemented for GL".into()));
            };
            if d % 2 != 0 {
                return Err(Error::BadSpec("graph automorphism needs even dimension".into()));
            }
            let base_meta = make_group_with_caps(base, caps)?;
            let lin = base_meta.linear.as_ref().unwrap();
            let linear = Linear::new(lin.field.clone(), d, None, false, true)?;
            cap_check("degree", linear.degree() as u128, caps.max_degree as u128)?;
            let j = FormSpec::symplectic(&linear.field, d)?.gram;
            let jinv = j.inv()?;
            let n = linear.num_points();
            let mut images = vec![0u32; 2 * n];
            for (i, v) in linear.points.iter().enumerate() {
                images[i] = n as u32 + linear.index_of(&j.apply(v)).unwrap();
                images[n + i] = linear.index_of(&jinv.apply(v)).unwrap();
            }
            let tau = Perm::from_images(images)?;
            let mut gens = base_meta
                .gen_matrices
                .iter()
                .map(|m| linear.perm_of(m))
                .collect::<Result<Vec<_>>>()?;
            gens.push(tau.clone());
            let order = 2 * base_meta.order();
            cap_check("group order", order, caps.max_order)?;
            let g = PermGroup::with_caps(linear.degree(), gens, caps)?;
            if g.order() != order {
                return Err(Error::Internal("graph extension order mismatch".into()));
            }
            Ok(GroupMeta {
                spec: spec.clone(),
                group: Arc::new(g),
                characteristic: base_meta.characteristic,
                action: Action::VectorsAndDuals,
                linear: Some(Arc::new(linear)),
                gen_matrices: base_meta.gen_matrices,
                graph_automorphism: Some(tau),
                field_automorphism: None,
                wreath: None,
            })
        }
        AutTag::Field => {
            let base_meta = make_group_with_caps(base, caps)?;
            let lin = base_meta
                .linear
                .clone()
                .filter(|l| !l.with_duals)
                .ok_or_else(|| Error::BadSpec("field automorphism needs a matrix group".into()))?;
            let f = lin.field.clone();
            let k = f.k();
            let phi = lin.perm_of_map(|v| v.iter().map(|&c| f.frobenius(c, power)).collect())?;
            let ord = (k / gcd(k as u128, power as u128) as u32) as u128;
            let order = base_meta.order() * ord;
            cap_check("group order", order, caps.max_order)?;
            let mut gens = base_meta.group.generators().to_vec();
            gens.push(phi.clone());
            let g = PermGroup::with_caps(lin.degree(), gens, caps)?;
            if g.order() != order {
                return Err(Error::Internal(format!(
                    "field extension has order {} not {order}",
                    g.order()
                )));
            }
            Ok(GroupMeta {
                spec: spec.clone(),
                group: Arc::new(g),
                field_automorphism: Some(phi),
                ..base_meta
            })
        }
        AutTag::Diagonal => {
            let base_meta = make_group_with_caps(base, caps)?;
            let lin = base_meta.linear.clone().filter(|l| l.projective).ok_or_else(|| {
                Error::BadSpec("diagonal automorphism needs a projective PSL or PSp".into())
            })?;
            let f = lin.field.clone();
            let d = lin.dim;
            let q = f.order() as u128;
            let (diag, extra) = match base {
                GroupSpec::PSL { .. } => {
                    let mut v = vec![1; d];
                    v[0] = f.primitive();
                    (v, gcd(d as u128, q - 1))
                }
                GroupSpec::PSp { .. } => {
                    let v = (0..d).map(|i| if i < d / 2 { f.primitive() } else { 1 }).collect();
                    (v, gcd(2, q - 1))
                }
                _ => return Err(Error::BadSpec("diagonal automorphism is implemented for PSL and PSp".into())),
            };
            let m = Matrix::diag(&f, &diag);
            let mut gens = base_meta.group.generators().to_vec();
            gens.push(lin.perm_of(&m)?);
            let order = base_meta.order() * extra;
            cap_check("group order", order, caps.max_order)?;
            let g = PermGroup::with_caps(lin.degree(), gens, caps)?;
            if g.order() != order {
                return Err(Error::Internal("diagonal extension order mismatch".into()));
            }
            let mut mats = base_meta.gen_matrices.clone();
            mats.push(m);
            Ok(GroupMeta {
                spec: spec.clone(),
                group: Arc::new(g),
                gen_matrices: mats,
                ..base_meta
            })
        }
    }
}

/// Semisimple / unipotent classification in the defining characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Semisimple,
    Unipotent,
    Mixed,
    Na,
}

pub fn classify_order(order: u64, p: u32) -> ElementKind {
    if p == 0 {
        return ElementKind::Na;
    }
    let p = p as u64;
    if order == 1 || order % p != 0 {
        ElementKind::Semisimple
    } else if crate::arith::is_power_of(order as u128, p as u128) {
        ElementKind::Unipotent
    } else {
        ElementKind::Mixed
    }
}

/// Unipotent iff the order is a power of `p`, semisimple iff prime to `p`;
/// the identity counts as semisimple.
pub fn classify_element(meta: &GroupMeta, x: &Perm) -> Result<ElementKind> {
    meta.group.require(x)?;
    Ok(classify_order(x.order(), meta.characteristic))
}

/// Least prime dividing `q^n − 1` but no `q^m − 1` with `m < n`.
pub fn zsigmondy(q: u64, n: u32) -> Option<u64> {
    let big = (q as u128).checked_pow(n)? - 1;
    factorize(big)
        .into_iter()
        .map(|(l, _)| l)
        .find(|&l| {
            let mut x = 1u128;
            for m in 1..n {
                x = x * q as u128 % l;
                if x == 1 {
                    return m == n;
                }
            }
            true
        })
        .map(|l| l as u64)
}

/// `{tr(u v) : u ∈ a^G, v ∈ b^G}` for `G = SL_2(q)`, `a = diag(x, x⁻¹)`,
/// `b = diag(y, y⁻¹)`.
pub fn sl2_trace_set(f: &Arc<Field>, x: Elem, y: Elem) -> Result<BTreeSet<Elem>> {
    let a = Matrix::diag(f, &[x, f.inv(x)?]);
    let b = Matrix::diag(f, &[y, f.inv(y)?]);
    let mut out = BTreeSet::new();
    for g0 in f.elements() {
        for g1 in f.elements() {
            for g2 in f.elements() {
                for g3 in f.elements() {
                    if f.sub(f.mul(g0, g3), f.mul(g1, g2)) != 1 {
                        continue;
                    }
                    let g = Matrix::from_rows(f, &[vec![g0, g1], vec![g2, g3]])?;
                    let u = g.inv()?.mul(&a)?.mul(&g)?;
                    let p = u.mul(&b)?;
                    out.insert(f.add(p.get(0, 0), p.get(1, 1)));
                }
            }
        }
    }
    Ok(out)
}

/// Named elements used by the worked examples.
pub fn special_element(meta: &GroupMeta, tag: &str) -> Result<Perm> {
    let bad = || Error::BadSpec(format!("special element {tag:?} is not defined for {}", meta.label()));
    let x = match tag {
        "graph-involution-class-rep" | "graph-involution" => meta.graph_automorphism.clone().ok_or_else(bad)?,
        "field-automorphism" => meta.field_automorphism.clone().ok_or_else(bad)?,
        "wreath-shift" => {
            let w = meta.wreath.as_ref().ok_or_else(bad)?;
            let total = w.inner_degree * w.copies;
            Perm::from_images((0..total).map(|i| ((i + w.inner_degree) % total) as u32).collect())?
        }
        "wreath-coordinate-involution" => {
            let w = meta.wreath.as_ref().ok_or_else(bad)?;
            let inv = first_element_of_order(&w.inner, 2).ok_or_else(bad)?;
            embed(&inv, 0, w.inner_degree * w.copies)
        }
        _ => {
            let lin = meta.linear.as_ref().ok_or_else(bad)?;
            let f = &lin.field;
            let d = lin.dim;
            let sp_form = || FormSpec::symplectic(f, d).map_err(|_| bad());
            let m = match tag {
                "transvection" => match &lin.form {
                    Some(form) if form.kind == crate::ffmat::FormKind::Symplectic => {
                        form_transvection(form, &lin.basis(0), 1)
                    }
                    None => elementary(f, d, 0, 1, 1),
                    _ => return Err(bad()),
                },
                "a2-involution" => {
                    let form = lin.form.clone().filter(|_| f.p() == 2).ok_or_else(bad)?;
                    if form.kind != crate::ffmat::FormKind::Symplectic || d < 4 {
                        return Err(bad());
                    }
                    // t_w t_w' t_{w+w'} with (w, w') = 0
                    let (w, w2) = (lin.basis(0), lin.basis(1));
                    let sum: Vec<Elem> = w.iter().zip(&w2).map(|(a, b)| f.add(*a, *b)).collect();
                    let m = form_transvection(&form, &w, 1)
                        .mul(&form_transvection(&form, &w2, 1))?
                        .mul(&form_transvection(&form, &sum, 1))?;
                    if !form_value_vanishes(&m, &form)? {
                        return Err(Error::Internal("a2 involution fails the form condition".into()));
                    }
                    m
                }
                "hyperbolic-involution" => {
                    // −1 on the hyperbolic pair ⟨e_1, e_d⟩, +1 on its complement
                    sp_form()?;
                    if f.p() == 2 {
                        return Err(bad());
                    }
                    let mut v = vec![1; d];
                    v[0] = f.neg(1);
                    v[d - 1] = f.neg(1);
                    Matrix::diag(f, &v)
                }
                "pseudoreflection-image" | "pseudoreflection" => {
                    let mut v = vec![1; d];
                    v[0] = f.primitive();
                    Matrix::diag(f, &v)
                }
                _ => return Err(bad()),
            };
            lin.perm_of(&m)?
        }
    };
    meta.group.require(&x).map_err(|_| bad())?;
    Ok(x)
}

fn first_element_of_order(g: &PermGroup, o: u64) -> Option<Perm> {
    (0..g.order()).map(|i| g.element_at(i)).find(|x| x.order() == o)
}
