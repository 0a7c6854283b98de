//! Quasi-modular forms as companion lists (f_0,…,f_d) and component tuples
//! (F_0,…,F_d), with the operators acting on them and the maps between the two.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, Coefficient, Rational};
use crate::nhform::NHForm;

fn component_weight(k: &Rational, r: usize) -> Rational {
    k - Rational::integer(2 * r as i64)
}

/// Quasi-modular form f = f_0 with companions f_r of weight k − 2r.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "C: Coefficient + Serialize + serde::de::DeserializeOwned")]
#[serde(try_from = "ListRepr<C>", into = "ListRepr<C>")]
pub struct QMForm<C: Coefficient> {
    weight: Rational,
    components: Vec<NHForm<C>>,
}

/// Component tuple (F_0,…,F_d) with F_s of weight k − 2s, k the ambient weight.
/// Trailing zero components are allowed; equality ignores them.
#[derive(Clone, Serialize, Deserialize)]
#[serde(bound = "C: Coefficient + Serialize + serde::de::DeserializeOwned")]
#[serde(try_from = "ListRepr<C>", into = "ListRepr<C>")]
pub struct VVTuple<C: Coefficient> {
    weight: Rational,
    components: Vec<NHForm<C>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "C: Coefficient + Serialize + serde::de::DeserializeOwned")]
struct ListRepr<C: Coefficient> {
    kind: String,
    weight: Rational,
    components: Vec<NHForm<C>>,
}

impl<C: Coefficient> TryFrom<ListRepr<C>> for QMForm<C> {
    type Error = String;
    fn try_from(r: ListRepr<C>) -> std::result::Result<Self, String> {
        if r.kind != "qmform" {
            return Err(format!("expected kind \"qmform\", found {:?}", r.kind));
        }
        Ok(QMForm::new(r.weight, r.components))
    }
}

impl<C: Coefficient> From<QMForm<C>> for ListRepr<C> {
    fn from(f: QMForm<C>) -> Self {
        ListRepr {
            kind: "qmform".into(),
            weight: f.weight,
            components: f.components,
        }
    }
}

impl<C: Coefficient> TryFrom<ListRepr<C>> for VVTuple<C> {
    type Error = String;
    fn try_from(r: ListRepr<C>) -> std::result::Result<Self, String> {
        if r.kind != "vvtuple" {
            return Err(format!("expected kind \"vvtuple\", found {:?}", r.kind));
        }
        Ok(VVTuple::new(r.weight, r.components))
    }
}

impl<C: Coefficient> From<VVTuple<C>> for ListRepr<C> {
    fn from(t: VVTuple<C>) -> Self {
        ListRepr {
            kind: "vvtuple".into(),
            weight: t.weight,
            components: t.components,
        }
    }
}

fn normalize<C: Coefficient>(k: &Rational, comps: Vec<NHForm<C>>) -> Vec<NHForm<C>> {
    comps
        .into_iter()
        .enumerate()
        .map(|(r, f)| f.with_weight(component_weight(k, r)))
        .collect()
}

/// Σ of NHForms, all re-weighted to `w`.
fn sum_at<C: Coefficient>(w: &Rational, terms: impl IntoIterator<Item = NHForm<C>>) -> NHForm<C> {
    terms.into_iter().fold(NHForm::zero(w.clone()), |acc, t| {
        acc.add(&t.with_weight(w.clone()))
    })
}

impl<C: Coefficient> QMForm<C> {
    /// Builds the form, assigning component r the weight k − 2r and trimming
    /// trailing zero companions.
    pub fn new(weight: Rational, components: Vec<NHForm<C>>) -> Self {
        let mut components = normalize(&weight, components);
        while components.last().is_some_and(|f| f.is_zero()) {
            components.pop();
        }
        QMForm { weight, components }
    }

    /// Depth-0 form with f_0 = f.
    pub fn modular(f: NHForm<C>) -> Self {
        let k = f.weight().clone();
        QMForm::new(k, vec![f])
    }

    pub fn zero(weight: Rational) -> Self {
        QMForm::new(weight, vec![])
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn components(&self) -> &[NHForm<C>] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Largest r with f_r ≠ 0 (0 for the zero form).
    pub fn depth(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    /// f_r, zero outside 0..=depth.
    pub fn comp(&self, r: isize) -> NHForm<C> {
        let w = &self.weight - Rational::integer(2 * r as i64);
        if r < 0 {
            return NHForm::zero(w);
        }
        self.components
            .get(r as usize)
            .cloned()
            .unwrap_or_else(|| NHForm::zero(w))
    }

    fn len(&self) -> isize {
        self.components.len() as isize
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        QMForm::new(
            self.weight.clone(),
            (0..n).map(|r| self.comp(r).add(&other.comp(r))).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_q(&-Rational::one()))
    }

    pub fn scale_q(&self, c: &Rational) -> Self {
        QMForm::new(
            self.weight.clone(),
            self.components.iter().map(|f| f.scale_q(c)).collect(),
        )
    }

    pub fn scale(&self, c: &crate::exact::Scalar) -> Self {
        QMForm::new(
            self.weight.clone(),
            self.components.iter().map(|f| f.scale(c)).collect(),
        )
    }

    /// ∂_τ: r-th companion ∂f_r + (k+1−r)f_{r−1}.
    pub fn derive(&self) -> Self {
        let k2 = &self.weight + Rational::integer(2);
        let comps = (0..=self.len())
            .map(|r| {
                let w = component_weight(&k2, r as usize);
                let c = &self.weight + Rational::integer(1 - r as i64);
                sum_at(&w, [self.comp(r).derive(), self.comp(r - 1).scale_q(&c)])
            })
            .collect();
        QMForm::new(k2, comps)
    }

    /// f/(−2iy): r-th companion f_r·Y + f_{r−1}.
    pub fn div_neg2iy(&self) -> Self {
        let k2 = &self.weight + Rational::integer(2);
        let comps = (0..=self.len())
            .map(|r| {
                let w = component_weight(&k2, r as usize);
                sum_at(&w, [self.comp(r).mul_y(), self.comp(r - 1)])
            })
            .collect();
        QMForm::new(k2, comps)
    }

    /// δ_{k−d}: r-th companion δ_{k−d}f_r + (d+1−r)f_{r−1}; depth does not grow.
    pub fn delta(&self) -> Self {
        let d = self.depth() as i64;
        let l = &self.weight - Rational::integer(d);
        let k2 = &self.weight + Rational::integer(2);
        let comps: Vec<NHForm<C>> = (0..=self.len())
            .map(|r| {
                let w = component_weight(&k2, r as usize);
                let c = Rational::integer(d + 1 - r as i64);
                sum_at(&w, [self.comp(r).raise(&l), self.comp(r - 1).scale_q(&c)])
            })
            .collect();
        if !self.is_zero() {
            assert!(
                comps[d as usize + 1].is_zero(),
                "delta produced a nonzero companion beyond the depth"
            );
        }
        QMForm::new(k2, comps)
    }

    /// y²∂τ̄ applied to every companion.
    pub fn lower(&self) -> Self {
        let quarter = Rational::new(1, 4);
        QMForm::new(
            &self.weight - Rational::integer(2),
            self.components
                .iter()
                .map(|f| f.lower4().scale_q(&quarter))
                .collect(),
        )
    }

    /// f ↦ f_1, with companions (r+1)·f_{r+1}.
    pub fn shift1(&self) -> Self {
        QMForm::new(
            &self.weight - Rational::integer(2),
            (0..self.len() - 1)
                .map(|r| self.comp(r + 1).scale_q(&Rational::integer(r as i64 + 1)))
                .collect(),
        )
    }

    /// Product; companions convolve.
    pub fn mul(&self, other: &Self) -> Self {
        let k = &self.weight + &other.weight;
        let n = (self.len() + other.len() - 1).max(0);
        let comps = (0..n)
            .map(|r| {
                let w = component_weight(&k, r as usize);
                sum_at(&w, (0..=r).map(|i| self.comp(i).mul(&other.comp(r - i))))
            })
            .collect();
        QMForm::new(k, comps)
    }

    /// F_s = Σ_{r≥s} C(r,s)·f_r·(1/(2iy))^{r−s}.
    pub fn to_tuple(&self) -> VVTuple<C> {
        let comps = (0..self.components.len())
            .map(|s| {
                let w = component_weight(&self.weight, s);
                sum_at(
                    &w,
                    (s..self.components.len()).map(|r| {
                        self.components[r]
                            .mul_neg_y_pow((r - s) as u32)
                            .scale_q(&binomial(r, s))
                    }),
                )
            })
            .collect();
        VVTuple::new(self.weight.clone(), comps)
    }
}

impl<C: Coefficient> VVTuple<C> {
    pub fn new(weight: Rational, components: Vec<NHForm<C>>) -> Self {
        let components = normalize(&weight, components);
        VVTuple { weight, components }
    }

    pub fn zero(weight: Rational, len: usize) -> Self {
        let comps = (0..len)
            .map(|s| NHForm::zero(component_weight(&weight, s)))
            .collect();
        VVTuple::new(weight, comps)
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn components(&self) -> &[NHForm<C>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|f| f.is_zero())
    }

    /// Index of the last nonzero component (0 if none).
    pub fn depth(&self) -> usize {
        self.components
            .iter()
            .rposition(|f| !f.is_zero())
            .unwrap_or(0)
    }

    /// F_s, zero outside the stored range.
    pub fn comp(&self, s: isize) -> NHForm<C> {
        let w = &self.weight - Rational::integer(2 * s as i64);
        if s < 0 {
            return NHForm::zero(w);
        }
        self.components
            .get(s as usize)
            .cloned()
            .unwrap_or_else(|| NHForm::zero(w))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len()) as isize;
        VVTuple::new(
            self.weight.clone(),
            (0..n).map(|s| self.comp(s).add(&other.comp(s))).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_q(&-Rational::one()))
    }

    pub fn scale_q(&self, c: &Rational) -> Self {
        VVTuple::new(
            self.weight.clone(),
            self.components.iter().map(|f| f.scale_q(c)).collect(),
        )
    }

    pub fn with_weight(&self, weight: Rational) -> Self {
        VVTuple::new(weight, self.components.clone())
    }

    /// f_r = Σ_{s≥r} C(s,r)·F_s·Y^{s−r}.
    pub fn to_qm(&self) -> QMForm<C> {
        let n = self.components.len();
        let comps = (0..n)
            .map(|r| {
                let w = component_weight(&self.weight, r);
                sum_at(
                    &w,
                    (r..n).map(|s| {
                        self.components[s]
                            .mul_y_pow((s - r) as u32)
                            .scale_q(&binomial(s, r))
                    }),
                )
            })
            .collect();
        QMForm::new(self.weight.clone(), comps)
    }

    /// Pad with zero components up to `new_len`.
    pub fn embed(&self, new_len: usize) -> Result<Self> {
        if new_len < self.len() {
            return Err(Error::EmbedShorter {
                from: self.len(),
                to: new_len,
            });
        }
        Ok(VVTuple::new(
            self.weight.clone(),
            (0..new_len as isize).map(|s| self.comp(s)).collect(),
        ))
    }

    /// Drop trailing zero components.
    pub fn trimmed(&self) -> Self {
        let mut comps = self.components.clone();
        while comps.last().is_some_and(|f| f.is_zero()) {
            comps.pop();
        }
        VVTuple::new(self.weight.clone(), comps)
    }
}

impl<C: Coefficient> PartialEq for VVTuple<C> {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.trimmed().components == other.trimmed().components
    }
}

impl<C: Coefficient> fmt::Debug for QMForm<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QMForm")
            .field("weight", &self.weight)
            .field("components", &self.components)
            .finish()
    }
}

impl<C: Coefficient> fmt::Debug for VVTuple<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VVTuple")
            .field("weight", &self.weight)
            .field("components", &self.components)
            .finish()
    }
}
