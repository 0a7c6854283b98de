//! Weight-changing operators on component tuples and the commutator / sl₂ checks.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Coefficient, Rational, Scalar, SymCoeff};
use crate::nhform::NHForm;
use crate::quasimod::VVTuple;
use crate::random;

/// (a, b, c) with ab + (1−a)c = 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleParams {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl TripleParams {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        if &a * &b + (Rational::one() - &a) * &c != Rational::one() {
            return Err(Error::InvalidTriple { a, b, c });
        }
        Ok(TripleParams { a, b, c })
    }

    /// (1, 1, 0)
    pub fn shimura_maass() -> Self {
        TripleParams::new(Rational::one(), Rational::one(), Rational::zero()).unwrap()
    }

    /// (0, 0, 1)
    pub fn holomorphic() -> Self {
        TripleParams::new(Rational::zero(), Rational::zero(), Rational::one()).unwrap()
    }
}

fn w_at(k: &Rational, s: isize) -> Rational {
    k - Rational::integer(2 * s as i64)
}

fn combine<C: Coefficient>(w: Rational, terms: impl IntoIterator<Item = NHForm<C>>) -> NHForm<C> {
    terms
        .into_iter()
        .fold(NHForm::zero(w.clone()), |acc, t| acc.add(&t.with_weight(w.clone())))
}

/// δ_{k−d} on V_d-valued forms: component s is δ_{k−2s}F_s + (d+1−s)F_{s−1}.
pub fn vv_raise<C: Coefficient>(t: &VVTuple<C>) -> VVTuple<C> {
    let k = t.weight();
    let k2 = k + Rational::integer(2);
    let d = t.len() as isize - 1;
    let comps = (0..=d)
        .map(|s| {
            combine(
                w_at(&k2, s),
                [
                    t.comp(s).raise(&w_at(k, s)),
                    t.comp(s - 1).scale_q(&Rational::integer((d + 1 - s) as i64)),
                ],
            )
        })
        .collect();
    VVTuple::new(k2, comps)
}

/// ī/(−2iy): component s is F_{s−1}; length grows by one.
pub fn vv_ibar_over<C: Coefficient>(t: &VVTuple<C>) -> VVTuple<C> {
    let k2 = t.weight() + Rational::integer(2);
    let comps = (0..=t.len() as isize).map(|s| t.comp(s - 1)).collect();
    VVTuple::new(k2, comps)
}

/// D: component s is (s+1)F_{s+1}.
pub fn vv_d<C: Coefficient>(t: &VVTuple<C>) -> VVTuple<C> {
    let k2 = t.weight() - Rational::integer(2);
    let comps = (0..t.len() as isize)
        .map(|s| t.comp(s + 1).scale_q(&Rational::integer(s as i64 + 1)))
        .collect();
    VVTuple::new(k2, comps)
}

/// y²∂τ̄: component s is ¼·4y²∂τ̄F_s + ((s+1)/4)·F_{s+1}.
pub fn vv_lower<C: Coefficient>(t: &VVTuple<C>) -> VVTuple<C> {
    let k2 = t.weight() - Rational::integer(2);
    let comps = (0..t.len() as isize)
        .map(|s| {
            combine(
                w_at(&k2, s),
                [
                    t.comp(s).lower4().scale_q(&Rational::new(1, 4)),
                    t.comp(s + 1).scale_q(&Rational::new(s as i64 + 1, 4)),
                ],
            )
        })
        .collect();
    VVTuple::new(k2, comps)
}

/// 4y²∂τ̄ on tuples (four times [`vv_lower`]).
pub fn vv_lower4<C: Coefficient>(t: &VVTuple<C>) -> VVTuple<C> {
    vv_lower(t).scale_q(&Rational::integer(4))
}

/// δ̃_l: component s is δ_{k−2s}F_s + (k−l+1−s)F_{s−1}, s = 0..=d+1.
pub fn vv_tilde_delta<C: Coefficient>(t: &VVTuple<C>, l: &Rational) -> VVTuple<C> {
    let k = t.weight();
    let k2 = k + Rational::integer(2);
    let comps = (0..=t.len() as isize)
        .map(|s| {
            let c = k - l + Rational::integer(1 - s as i64);
            combine(
                w_at(&k2, s),
                [t.comp(s).raise(&w_at(k, s)), t.comp(s - 1).scale_q(&c)],
            )
        })
        .collect();
    VVTuple::new(k2, comps)
}

/// W: multiplication by the ambient weight.
pub fn vv_weight<C: Coefficient>(t: &VVTuple<C>) -> VVTuple<C> {
    t.scale_q(t.weight())
}

/// E = δ̃_{ak} at ambient weight k.
pub fn sl2_e<C: Coefficient>(t: &VVTuple<C>, p: &TripleParams) -> VVTuple<C> {
    vv_tilde_delta(t, &(&p.a * t.weight()))
}

/// F = b·4y²∂τ̄ − c·D.
pub fn sl2_f<C: Coefficient>(t: &VVTuple<C>, p: &TripleParams) -> VVTuple<C> {
    vv_lower4(t)
        .scale_q(&p.b)
        .sub(&vv_d(t).scale_q(&p.c))
}

/// Operator tags for composing checks and for the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    RaiseDelta,
    TildeDelta(Rational),
    Lower4,
    IbarOver,
    D,
    MulByWeight,
}

impl OperatorSpec {
    pub fn apply<C: Coefficient>(&self, t: &VVTuple<C>) -> VVTuple<C> {
        match self {
            OperatorSpec::RaiseDelta => vv_raise(t),
            OperatorSpec::TildeDelta(l) => vv_tilde_delta(t, l),
            OperatorSpec::Lower4 => vv_lower4(t),
            OperatorSpec::IbarOver => vv_ibar_over(t),
            OperatorSpec::D => vv_d(t),
            OperatorSpec::MulByWeight => vv_weight(t),
        }
    }

    /// Ambient weight of the output for input ambient weight k.
    pub fn target_weight(&self, k: &Rational) -> Rational {
        match self {
            OperatorSpec::RaiseDelta | OperatorSpec::TildeDelta(_) | OperatorSpec::IbarOver => {
                k + Rational::integer(2)
            }
            OperatorSpec::Lower4 | OperatorSpec::D => k - Rational::integer(2),
            OperatorSpec::MulByWeight => k.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub witness: String,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Describe `lhs` relative to `t`: the scalar c with lhs = c·t when one exists.
pub fn witness_scalar(lhs: &VVTuple<SymCoeff>, t: &VVTuple<SymCoeff>) -> Option<Scalar> {
    if lhs.is_zero() {
        return Some(Scalar::zero());
    }
    for (s, f) in t.components().iter().enumerate() {
        for (deg, c) in f.parts() {
            if let Some((m, x)) = c.terms().next() {
                let y = lhs
                    .comp(s as isize)
                    .part(*deg)
                    .and_then(|lc| lc.terms().find(|(lm, _)| *lm == m).map(|(_, v)| v.clone()))
                    .unwrap_or_default();
                let ratio = y.checked_div(x)?;
                let scaled = VVTuple::new(
                    t.weight().clone(),
                    t.components().iter().map(|f| f.scale(&ratio)).collect(),
                );
                return (scaled.with_weight(lhs.weight().clone()) == *lhs).then_some(ratio);
            }
        }
    }
    None
}

/// Compare `lhs` with `expected`·t; returns (holds, witness text).
fn judge(lhs: &VVTuple<SymCoeff>, t: &VVTuple<SymCoeff>, expected: &Rational) -> (bool, String) {
    let target = t.scale_q(expected).with_weight(lhs.weight().clone());
    let ok = *lhs == target;
    let witness = match witness_scalar(lhs, t) {
        Some(s) => format!("{s}"),
        None => {
            let resid = lhs.sub(&target);
            format!(
                "not a scalar multiple; residual nonzero in components {:?}",
                resid
                    .components()
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| !f.is_zero())
                    .map(|(i, _)| i)
                    .collect::<Vec<_>>()
            )
        }
    };
    (ok, witness)
}

struct Case {
    k: Rational,
    l: Rational,
    t: VVTuple<SymCoeff>,
}

fn draw_cases(seed: u64, depth_bound: usize, draws: usize) -> Vec<Case> {
    let mut rng = random::rng(seed);
    (0..draws)
        .map(|i| {
            let k = random::rational(&mut rng);
            let l = random::rational(&mut rng);
            let len = 1 + i % (depth_bound + 1);
            let t = random::tuple(&mut rng, &k, len, true);
            Case { k, l, t }
        })
        .collect()
}

type Relation = (&'static str, fn(&Case) -> (VVTuple<SymCoeff>, Rational));

fn commutator_relations() -> Vec<Relation> {
    vec![
        ("(i) [y^2 dbar, D] = 0", |c| {
            (vv_lower(&vv_d(&c.t)).sub(&vv_d(&vv_lower(&c.t))), Rational::zero())
        }),
        ("(ii) tilde_delta_{l+2} ibar = ibar tilde_delta_l", |c| {
            let l2 = &c.l + Rational::integer(2);
            let lhs = vv_tilde_delta(&vv_ibar_over(&c.t), &l2);
            let rhs = vv_ibar_over(&vv_tilde_delta(&c.t, &c.l));
            (lhs.sub(&rhs).with_weight(c.k.clone()), Rational::zero())
        }),
        ("(ii') tilde_delta_{l+1} ibar = ibar tilde_delta_l", |c| {
            let l1 = &c.l + Rational::integer(1);
            let lhs = vv_tilde_delta(&vv_ibar_over(&c.t), &l1);
            let rhs = vv_ibar_over(&vv_tilde_delta(&c.t, &c.l));
            (lhs.sub(&rhs).with_weight(c.k.clone()), Rational::zero())
        }),
        ("(iii) [D, ibar] = id", |c| {
            (vv_d(&vv_ibar_over(&c.t)).sub(&vv_ibar_over(&vv_d(&c.t))), Rational::one())
        }),
        ("(iv) D tilde_delta_l - tilde_delta_l D = (k-l) id", |c| {
            let lhs = vv_d(&vv_tilde_delta(&c.t, &c.l)).sub(&vv_tilde_delta(&vv_d(&c.t), &c.l));
            (lhs, &c.k - &c.l)
        }),
        ("(v) [y^2 dbar, ibar] = 1/4 id", |c| {
            let lhs = vv_lower(&vv_ibar_over(&c.t)).sub(&vv_ibar_over(&vv_lower(&c.t)));
            (lhs, Rational::new(1, 4))
        }),
        ("(vi) y^2 dbar tilde_delta_l - tilde_delta_{l-2} y^2 dbar = -l/4 id", |c| {
            let l2 = &c.l - Rational::integer(2);
            let lhs = vv_lower(&vv_tilde_delta(&c.t, &c.l))
                .sub(&vv_tilde_delta(&vv_lower(&c.t), &l2));
            (lhs, -&c.l / Rational::integer(4))
        }),
    ]
}

fn run_relation(
    name: &str,
    f: fn(&Case) -> (VVTuple<SymCoeff>, Rational),
    cases: &[Case],
    mut params: BTreeMap<String, String>,
) -> RelationReport {
    let results: Vec<(bool, String, usize)> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let (lhs, expected) = f(c);
            let (ok, w) = judge(&lhs, &c.t, &expected);
            (ok, format!("k={}, l={}: {}", c.k, c.l, w), i)
        })
        .collect();
    let failures: Vec<&(bool, String, usize)> = results.iter().filter(|r| !r.0).collect();
    params.insert("cases".into(), cases.len().to_string());
    let (status, witness) = match failures.first() {
        None => (Status::Pass, results[0].1.clone()),
        Some(first) => {
            params.insert("failing_cases".into(), failures.len().to_string());
            (Status::Fail, format!("case {}: {}", first.2, first.1))
        }
    };
    RelationReport {
        relation: name.to_string(),
        params,
        status,
        witness,
    }
}

/// The six commutator relations, plus (ii) with the index that does hold, on random
/// symbolic tuples of length ≤ depth_bound+1.
pub fn check_commutators(depth_bound: usize, draws: usize, seed: u64) -> Vec<RelationReport> {
    let cases = draw_cases(seed, depth_bound, draws);
    let mut params = BTreeMap::new();
    params.insert("depth_bound".to_string(), depth_bound.to_string());
    params.insert("seed".to_string(), seed.to_string());
    commutator_relations()
        .into_iter()
        .map(|(name, f)| run_relation(name, f, &cases, params.clone()))
        .collect()
}

/// [W,E] = 2E, [W,F] = −2F, [E,F] = W on random symbolic tuples.
pub fn check_sl2(
    p: &TripleParams,
    depth_bound: usize,
    draws: usize,
    seed: u64,
) -> Vec<RelationReport> {
    let cases = draw_cases(seed, depth_bound, draws);
    let mut params = BTreeMap::new();
    params.insert("a".to_string(), p.a.to_string());
    params.insert("b".to_string(), p.b.to_string());
    params.insert("c".to_string(), p.c.to_string());
    params.insert("depth_bound".to_string(), depth_bound.to_string());
    params.insert("seed".to_string(), seed.to_string());

    let run = |name: &str, f: &(dyn Fn(&VVTuple<SymCoeff>) -> (VVTuple<SymCoeff>, VVTuple<SymCoeff>) + Sync)| {
        let results: Vec<(bool, String)> = cases
            .par_iter()
            .map(|c| {
                let (lhs, rhs) = f(&c.t);
                let ok = lhs == rhs;
                let w = if ok {
                    "zero residual".to_string()
                } else {
                    let resid = lhs.sub(&rhs.with_weight(lhs.weight().clone()));
                    match witness_scalar(&resid, &c.t) {
                        Some(s) => format!("k={}: residual = ({s})*T", c.k),
                        None => format!(
                            "k={}: residual not a multiple of T (nonzero components {:?})",
                            c.k,
                            resid
                                .components()
                                .iter()
                                .enumerate()
                                .filter(|(_, f)| !f.is_zero())
                                .map(|(i, _)| i)
                                .collect::<Vec<_>>()
                        ),
                    }
                };
                (ok, w)
            })
            .collect();
        let mut prm = params.clone();
        prm.insert("cases".into(), cases.len().to_string());
        let fails: Vec<usize> = (0..results.len()).filter(|&i| !results[i].0).collect();
        let (status, witness) = match fails.first() {
            None => (Status::Pass, "zero residual".to_string()),
            Some(&i) => {
                prm.insert("failing_cases".into(), fails.len().to_string());
                (Status::Fail, format!("case {i}: {}", results[i].1))
            }
        };
        RelationReport {
            relation: name.to_string(),
            params: prm,
            status,
            witness,
        }
    };

    vec![
        run("[W,E] = 2E", &|t| {
            let lhs = vv_weight(&sl2_e(t, p)).sub(&sl2_e(&vv_weight(t), p));
            (lhs, sl2_e(t, p).scale_q(&Rational::integer(2)))
        }),
        run("[W,F] = -2F", &|t| {
            let lhs = vv_weight(&sl2_f(t, p)).sub(&sl2_f(&vv_weight(t), p));
            (lhs, sl2_f(t, p).scale_q(&Rational::integer(-2)))
        }),
        run("[E,F] = W", &|t| {
            let lhs = sl2_e(&sl2_f(t, p), p).sub(&sl2_f(&sl2_e(t, p), p));
            (lhs, vv_weight(t))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn gen(w: Rational) -> NHForm<SymCoeff> {
        NHForm::holomorphic(w.clone(), SymCoeff::generator(0, w))
    }

    #[test]
    fn triple_constraint() {
        assert!(TripleParams::new(q!(2), q!(3, 4), q!(1, 2)).is_ok());
        assert!(TripleParams::new(q!(2), q!(1), q!(0)).is_err());
    }

    #[test]
    fn small_examples() {
        let k = q!(6);
        let t = VVTuple::new(k.clone(), vec![gen(k.clone())]);
        assert_eq!(vv_raise(&t).components()[0], gen(k.clone()).raise(&k));
        assert_eq!(vv_ibar_over(&t).len(), 2);
        assert!(vv_d(&t).is_zero());
        assert!(vv_lower(&t).is_zero());
        let td = vv_tilde_delta(&t, &k);
        assert!(td.components()[1].is_zero());
        assert_eq!(td.components()[0], gen(k.clone()).raise(&k));
    }

    #[test]
    fn operator_spec_weights() {
        let k = q!(5, 2);
        let t = random::tuple(&mut random::rng(3), &k, 3, true);
        for op in [
            OperatorSpec::RaiseDelta,
            OperatorSpec::TildeDelta(q!(1, 3)),
            OperatorSpec::Lower4,
            OperatorSpec::IbarOver,
            OperatorSpec::D,
            OperatorSpec::MulByWeight,
        ] {
            assert_eq!(op.apply(&t).weight(), &op.target_weight(&k));
        }
    }

    #[test]
    fn ibar_shift_uses_index_plus_one() {
        let mut rng = random::rng(11);
        for len in 1..4 {
            let k = random::rational(&mut rng);
            let l = random::rational(&mut rng);
            let t = random::tuple(&mut rng, &k, len, true);
            let rhs = vv_ibar_over(&vv_tilde_delta(&t, &l));
            let lhs1 = vv_tilde_delta(&vv_ibar_over(&t), &(&l + q!(1)));
            assert_eq!(lhs1, rhs);
            let lhs2 = vv_tilde_delta(&vv_ibar_over(&t), &(&l + q!(2)));
            let ii = vv_ibar_over(&vv_ibar_over(&t));
            assert_eq!(lhs2.sub(&rhs), ii.scale_q(&q!(-1)));
        }
    }

    #[test]
    fn sl2_defect_formula() {
        // [E,F] − W = −2·ī∘(b(1−a)·4y²∂τ̄ + a·c·D)
        let mut rng = random::rng(5);
        for len in 1..4 {
            let p = random::triple(&mut rng);
            let k = random::rational(&mut rng);
            let t = random::tuple(&mut rng, &k, len, true);
            let ef = sl2_e(&sl2_f(&t, &p), &p).sub(&sl2_f(&sl2_e(&t, &p), &p));
            let defect = ef.sub(&vv_weight(&t));
            let one = q!(1);
            let inner = vv_lower4(&t)
                .scale_q(&(&p.b * (&one - &p.a)))
                .add(&vv_d(&t).scale_q(&(&p.a * &p.c)));
            let expected = vv_ibar_over(&inner).scale_q(&q!(-2));
            assert_eq!(defect, expected.with_weight(defect.weight().clone()));
        }
    }
}
