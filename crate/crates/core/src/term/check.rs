use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::eval_with;
use super::{EqKind, Equation};
use crate::bao::FiniteBao;
use crate::element::Element;
use crate::error::{Error, Result};

use super::Assignment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CheckMode {
    /// Every assignment, refusing when there are more than `cap` of them.
    Exhaustive { cap: u128 },
    /// `trials` uniformly random assignments from a seeded generator.
    Sampled { seed: u64, trials: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Verdict {
    /// No counterexample. `exhaustive == false` means the verdict is statistical.
    Holds {
        exhaustive: bool,
        assignments: u128,
        seed: Option<u64>,
    },
    /// A definitive failure, shrunk greedily atom by atom.
    Counterexample {
        assignment: Assignment,
        lhs: Element,
        rhs: Element,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

fn satisfied(kind: EqKind, l: &Element, r: &Element) -> bool {
    match kind {
        EqKind::Eq => l == r,
        EqKind::Le => l.le(r),
    }
}

fn sides(
    a: &FiniteBao,
    e: &Equation,
    vars: &[String],
    vals: &[Element],
) -> Result<(Element, Element)> {
    let env = |v: &str| vars.iter().position(|x| x == v).map(|k| &vals[k]);
    Ok((eval_with(&e.lhs, a, &env)?, eval_with(&e.rhs, a, &env)?))
}

/// Checks `e` in `a`.
pub fn check_equation(a: &FiniteBao, e: &Equation, mode: CheckMode) -> Result<Verdict> {
    let vars = e.vars();
    let n = a.len();
    let found = match mode {
        CheckMode::Exhaustive { cap } => {
            let bits = n as u128 * vars.len() as u128;
            if bits >= 127 || 1u128 << bits > cap {
                return Err(Error::CapExceeded(format!(
                    "{} variables over {n} atoms exceed the exhaustive cap {cap}",
                    vars.len()
                )));
            }
            let total = 1u128 << bits;
            let mut found = None;
            let mut vals = vec![Element::zero(n); vars.len()];
            for code in 0..total {
                for (k, v) in vals.iter_mut().enumerate() {
                    *v = Element::from_atoms(n, (0..n).filter(|&i| code >> (k * n + i) & 1 == 1));
                }
                let (l, r) = sides(a, e, &vars, &vals)?;
                if !satisfied(e.kind, &l, &r) {
                    found = Some(vals.clone());
                    break;
                }
            }
            match found {
                Some(v) => v,
                None => {
                    return Ok(Verdict::Holds {
                        exhaustive: true,
                        assignments: total,
                        seed: None,
                    })
                }
            }
        }
        CheckMode::Sampled { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = None;
            for _ in 0..trials {
                let vals: Vec<Element> = vars
                    .iter()
                    .map(|_| Element::from_atoms(n, (0..n).filter(|_| rng.gen::<bool>())))
                    .collect();
                let (l, r) = sides(a, e, &vars, &vals)?;
                if !satisfied(e.kind, &l, &r) {
                    found = Some(vals);
                    break;
                }
            }
            match found {
                Some(v) => v,
                None => {
                    return Ok(Verdict::Holds {
                        exhaustive: false,
                        assignments: trials as u128,
                        seed: Some(seed),
                    })
                }
            }
        }
    };
    let vals = shrink(a, e, &vars, found)?;
    let (lhs, rhs) = sides(a, e, &vars, &vals)?;
    Ok(Verdict::Counterexample {
        assignment: vars.into_iter().zip(vals).collect(),
        lhs,
        rhs,
    })
}

fn shrink(
    a: &FiniteBao,
    e: &Equation,
    vars: &[String],
    mut vals: Vec<Element>,
) -> Result<Vec<Element>> {
    loop {
        let mut changed = false;
        for k in 0..vals.len() {
            for atom in vals[k].as_vec() {
                vals[k].remove(atom);
                let (l, r) = sides(a, e, vars, &vals)?;
                if satisfied(e.kind, &l, &r) {
                    vals[k].insert(atom);
                } else {
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(vals);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VarietyReport {
    pub mode: CheckMode,
    pub results: Vec<(Equation, Verdict)>,
}

impl VarietyReport {
    pub fn holds(&self) -> bool {
        self.results.iter().all(|(_, v)| v.holds())
    }

    pub fn failures(&self) -> impl Iterator<Item = &(Equation, Verdict)> {
        self.results.iter().filter(|(_, v)| !v.holds())
    }
}

/// Checks every equation; each one gets its own stream derived from the seed.
pub fn check_variety(a: &FiniteBao, sigma: &[Equation], mode: CheckMode) -> Result<VarietyReport> {
    let mut results = Vec::with_capacity(sigma.len());
    for (k, e) in sigma.iter().enumerate() {
        let m = match mode {
            CheckMode::Sampled { seed, trials } => CheckMode::Sampled {
                seed: seed.wrapping_add(k as u64),
                trials,
            },
            other => other,
        };
        results.push((e.clone(), check_equation(a, e, m)?));
    }
    Ok(VarietyReport { mode, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::AtomId;
    use crate::bao::complex_algebra;
    use crate::frame::{AtomStructure, Relation};
    use crate::ops::UnaryOp;
    use crate::sets::full_set_algebra;
    use crate::term::parse_equation;

    const CAP: CheckMode = CheckMode::Exhaustive { cap: 1 << 20 };

    #[test]
    fn set_cylindrifiers_are_idempotent_and_commute() {
        let a = full_set_algebra(3, 2, &[]).unwrap();
        for src in [
            "(= (c 0 (c 0 x)) (c 0 x))",
            "(= (c 0 (c 1 x)) (c 1 (c 0 x)))",
        ] {
            let v = check_equation(&a, &parse_equation(src).unwrap(), CAP).unwrap();
            assert!(matches!(
                v,
                Verdict::Holds {
                    exhaustive: true,
                    assignments: 256,
                    ..
                }
            ));
        }
    }

    #[test]
    fn non_commuting_frame_yields_atomic_counterexample() {
        // T0 = {(a,b)} and T1 = {(b,c)}, both closed under reflexivity
        let atoms = ["a", "b", "c"].map(|s| AtomId::Named(s.into())).to_vec();
        let refl = [(0, 0), (1, 1), (2, 2)];
        let frame = AtomStructure::builder(atoms, 2)
            .unary(
                UnaryOp::Cyl(0),
                Relation::from_pairs(3, refl.into_iter().chain([(0, 1)])),
            )
            .unary(
                UnaryOp::Cyl(1),
                Relation::from_pairs(3, refl.into_iter().chain([(1, 2)])),
            )
            .build()
            .unwrap();
        let a = complex_algebra(frame);
        let e = parse_equation("(= (c 0 (c 1 x)) (c 1 (c 0 x)))").unwrap();
        match check_equation(&a, &e, CAP).unwrap() {
            Verdict::Counterexample {
                assignment,
                lhs,
                rhs,
            } => {
                assert_eq!(assignment["x"].count(), 1);
                assert_ne!(lhs, rhs);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn refuses_above_cap() {
        let a = full_set_algebra(3, 2, &[]).unwrap();
        let e = parse_equation("(= (* x y) (* y x))").unwrap();
        assert!(matches!(
            check_equation(&a, &e, CheckMode::Exhaustive { cap: 1000 }),
            Err(Error::CapExceeded(_))
        ));
        let v = check_equation(
            &a,
            &e,
            CheckMode::Sampled {
                seed: 7,
                trials: 50,
            },
        )
        .unwrap();
        assert_eq!(
            v,
            Verdict::Holds {
                exhaustive: false,
                assignments: 50,
                seed: Some(7)
            }
        );
    }
}
