use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use cylkit::dims::{
    ca_frame_correspondents, neat_reduct, pea_frame_checks, ra_atom_axioms, ra_reduct, reduct_rho,
    relativize, RaCoords,
};
use cylkit::hh::{
    ca_of_hyperbasis, enumerate_hypernetworks, hh_algebra, is_hyperbasis, is_symmetric,
};
use cylkit::monk::monk_algebra;
use cylkit::morphisms::{
    amalgam_search, embeddings, find_isomorphism_with, AmalgamSearch, Arrow, Candidates, IsoOptions,
};
use cylkit::qra::{
    build_bn, check_quasiprojections, find_quasiprojections, qra_terms, trivial_qra, AxiomReading,
    QraContext, TermReading,
};
use cylkit::sets::{
    classify_base, directed_set_algebra, full_set_algebra, representation_search, DirectedBase,
    Representation, SearchOptions,
};
use cylkit::splitting::{build_base, split, transposition, witness_term, SplitSpec};
use cylkit::term::{
    ca_axioms, ca_schema, check_variety, eval, instantiate_schema, Assignment, CheckMode, Equation,
    SchemaTemplate, VarietyReport,
};
use cylkit::{complex_algebra, json as frame_json, Element, FiniteBao, UnaryOp};

use crate::report::{Outcome, Report};
use crate::{Check, Cli, Command, Construct, Qra, Schema};

const EXHAUSTIVE_CAP: u128 = 1 << 24;

pub fn run(cli: &Cli, r: &mut Report) -> Result<Outcome> {
    let parallel = cli.jobs != 1;
    match &cli.command {
        Command::Construct(c) => construct(c, r),
        Command::Check(c) => check(c, r),
        Command::NeatReduct { input, keep, out } => {
            let a = load(r, input)?;
            let nr = neat_reduct(&a, keep)?;
            r.verdict("atoms", nr.algebra.len());
            save(r, out.as_deref(), &nr.algebra)?;
            Ok(Outcome::Pass)
        }
        Command::Reduct { input, rho, out } => {
            let a = load(r, input)?;
            let red = reduct_rho(&a, rho)?;
            r.verdict("atoms", red.len());
            save(r, out.as_deref(), &red)?;
            Ok(Outcome::Pass)
        }
        Command::Relativize { input, x, out } => {
            let a = load(r, input)?;
            let x = element(&a, x)?;
            let rl = relativize(&a, &x)?;
            r.verdict("atoms", rl.len());
            save(r, out.as_deref(), &rl)?;
            Ok(Outcome::Pass)
        }
        Command::RaReduct { input, coords, out } => {
            let a = load(r, input)?;
            let coords = match coords.as_deref() {
                None => RaCoords::standard(a.dim()),
                Some(&[u, v, w]) => RaCoords { u, v, w },
                Some(_) => bail!("--coords takes three indices u,v,w"),
            };
            let ra = ra_reduct(&a, coords, true)?;
            r.verdict("atoms", ra.atoms);
            r.verdict("associative", ra.associative);
            save(r, out.as_deref(), &ra.algebra)?;
            Ok(Outcome::Pass)
        }
        Command::Schema(s) => schema(s, r),
        Command::Represent { input, max_base } => {
            let a = load(r, input)?;
            let found = representation_search(
                &a,
                SearchOptions {
                    max_base: *max_base,
                    parallel,
                },
            )?;
            r.lap("search");
            Ok(match found {
                Representation::Found { base, images } => {
                    r.verdict("representation", "found");
                    r.verdict("base", base);
                    r.witness(
                        "images",
                        images.iter().map(Element::as_vec).collect::<Vec<_>>(),
                    );
                    Outcome::Pass
                }
                Representation::Exhausted { max_base } => {
                    r.verdict("representation", "none");
                    r.verdict("max_base", max_base);
                    Outcome::Exhausted
                }
            })
        }
        Command::Iso { a, b, max_atoms } => {
            let a = load(r, a)?;
            let b = load(r, b)?;
            let opts = IsoOptions {
                max_atoms: *max_atoms,
                parallel,
                ..IsoOptions::default()
            };
            let found = find_isomorphism_with(&a, &b, opts)?;
            r.lap("search");
            Ok(match found {
                Some(w) => {
                    r.verdict("isomorphism", "found");
                    r.witness(
                        "images",
                        w.images.iter().map(Element::as_vec).collect::<Vec<_>>(),
                    );
                    Outcome::Pass
                }
                None => {
                    r.verdict("isomorphism", "none");
                    Outcome::Fail
                }
            })
        }
        Command::Amalgam { a0, a1, a2, bound } => {
            let a0 = load(r, a0)?;
            let a1 = load(r, a1)?;
            let a2 = load(r, a2)?;
            let first = |to: &FiniteBao| -> Result<Arrow> {
                let e = embeddings(&a0, to)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| anyhow!("A0 does not embed"))?;
                Ok(Arrow::new(a0.clone(), to.clone(), e))
            };
            let (i1, i2) = (first(&a1)?, first(&a2)?);
            let found = amalgam_search(&i1, &i2, &Candidates::Ca2Frames(*bound))?;
            r.lap("search");
            Ok(match found {
                AmalgamSearch::Found { d, report, .. } => {
                    r.verdict("amalgam", report.amalgam);
                    r.verdict("superamalgam", report.superamalgam);
                    r.verdict("amalgam_atoms", d.len());
                    r.witness("detail", &report.detail);
                    r.witness("interpolation_failure", &report.witness);
                    Outcome::Pass
                }
                AmalgamSearch::Exhausted { candidates } => {
                    r.verdict("amalgam", "none");
                    r.verdict("candidates", candidates);
                    Outcome::Exhausted
                }
            })
        }
        Command::Qra(q) => qra(q, r),
    }
}

fn load(r: &mut Report, path: &Path) -> Result<FiniteBao> {
    let text = r.read(path)?;
    Ok(complex_algebra(
        frame_json::from_str(&text).with_context(|| format!("loading {}", path.display()))?,
    ))
}

fn save(r: &mut Report, out: Option<&Path>, a: &FiniteBao) -> Result<()> {
    if let Some(path) = out {
        let mut text = frame_json::to_string(a.frame());
        text.push('\n');
        r.write(path, &text)?;
    }
    Ok(())
}

fn element(a: &FiniteBao, atoms: &[usize]) -> Result<Element> {
    Ok(Element::try_from_atoms(a.len(), atoms.iter().copied())?)
}

/// `[0,1][1,2]` → `[[0,1],[1,2]]`.
fn parse_groups(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('[')
            .ok_or_else(|| anyhow!("expected `[` in {s:?}"))?;
        let end = open
            .find(']')
            .ok_or_else(|| anyhow!("unclosed `[` in {s:?}"))?;
        let group = open[..end]
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad index in {s:?}"))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(group);
        rest = open[end + 1..].trim_start_matches([',', ';', ' ']);
    }
    Ok(out)
}

fn substitution(dim: usize, g: &[usize]) -> Result<Vec<usize>> {
    match g {
        &[i, j] if i < dim && j < dim => Ok(transposition(dim, i, j)),
        g if g.len() == dim => Ok(g.to_vec()),
        g => bail!("{g:?} is neither a transposition nor a permutation of {dim}"),
    }
}

fn construct(c: &Construct, r: &mut Report) -> Result<Outcome> {
    match c {
        Construct::Monk { m, n, out } => {
            let a = monk_algebra(*m, *n)?;
            r.verdict("atoms", a.len());
            save(r, out.as_deref(), &a)?;
        }
        Construct::Hh {
            n,
            r: rr,
            psi,
            networks,
            out,
        } => {
            let ra = hh_algebra(*n, *rr, *psi)?;
            r.verdict("atoms", ra.len());
            let a = match networks.nodes {
                Some(nodes) => {
                    let width = networks.width.unwrap_or(nodes);
                    let set = enumerate_hypernetworks(&ra, nodes, width, networks.lambda)?;
                    r.lap("enumerate");
                    r.verdict("network_count", set.len());
                    ca_of_hyperbasis(&set)?
                }
                None => ra,
            };
            save(r, out.as_deref(), &a)?;
        }
        Construct::Set {
            dim,
            base,
            subs,
            out,
        } => {
            let ops = parse_groups(subs)?
                .iter()
                .map(|g| substitution(*dim, g).map(UnaryOp::Subst))
                .collect::<Result<Vec<_>>>()?;
            let a = full_set_algebra(*dim, *base, &ops)?;
            r.verdict("atoms", a.len());
            save(r, out.as_deref(), &a)?;
        }
        Construct::Directed {
            alpha,
            size,
            rel,
            out,
        } => {
            let rel = match rel {
                Some(s) => s
                    .split(',')
                    .map(|pair| {
                        let (a, b) = pair
                            .split_once('-')
                            .ok_or_else(|| anyhow!("pair {pair:?} is not a-b"))?;
                        Ok((a.trim().parse()?, b.trim().parse()?))
                    })
                    .collect::<Result<Vec<(usize, usize)>>>()?,
                None => (0..*size)
                    .flat_map(|a| (0..*size).map(move |b| (a, b)))
                    .collect(),
            };
            let base = DirectedBase { size: *size, rel };
            let class = classify_base(&base)?;
            r.verdict("weak_p", class.weak_p);
            r.verdict("p_structure", class.p_structure);
            r.verdict("extensional", class.extensional);
            let a = directed_set_algebra(*alpha, &base)?;
            r.verdict("atoms", a.len());
            save(r, out.as_deref(), &a)?;
        }
        Construct::Split {
            alpha,
            sizes,
            atoms,
            subs,
            out,
        } => {
            let gens = parse_groups(subs)?
                .iter()
                .map(|g| substitution(*alpha, g))
                .collect::<Result<Vec<_>>>()?;
            let spec = SplitSpec::new(*alpha, sizes.clone(), *atoms, gens)?;
            let base = build_base(&spec)?;
            let s = split(&base, *atoms)?;
            r.verdict("base_atoms", base.algebra.len());
            r.verdict("group_order", base.group.len());
            r.verdict("atoms", s.algebra.len());
            let m = sizes[0];
            if m < *alpha {
                let env = Assignment::from([("x".to_string(), s.r_element())]);
                let tau = eval(&witness_term(m, *alpha)?, &s.algebra, &env)?;
                r.verdict("witness_m", m);
                r.verdict("witness_zero", tau.is_zero());
            }
            save(r, out.as_deref(), &s.algebra)?;
        }
    }
    Ok(Outcome::Pass)
}

/// `ca3` → `("ca", 3)`; `ra` → `("ra", 0)`.
fn variety(s: &str) -> Result<(&str, usize)> {
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (name, digits) = s.split_at(split);
    let n = if digits.is_empty() {
        0
    } else {
        digits.parse()?
    };
    match name {
        "ca" | "pea" if n >= 1 => Ok((name, n)),
        "ra" if digits.is_empty() => Ok((name, 0)),
        _ => bail!("unknown variety {s:?}; expected caN, peaN or ra"),
    }
}

fn mode(r: &Report, exhaustive: bool, trials: u64) -> CheckMode {
    if exhaustive {
        CheckMode::Exhaustive {
            cap: EXHAUSTIVE_CAP,
        }
    } else {
        CheckMode::Sampled {
            seed: r.seed,
            trials,
        }
    }
}

fn record_variety(r: &mut Report, rep: &VarietyReport) -> Outcome {
    r.verdict("equations", rep.results.len());
    r.verdict("holds", rep.holds());
    r.verdict("mode", rep.mode);
    let failures: Vec<_> = rep
        .failures()
        .map(|(e, v)| json!({"equation": e.to_string(), "verdict": v}))
        .collect();
    if !failures.is_empty() {
        r.witness("failures", failures);
    }
    Outcome::from_bool(rep.holds())
}

fn ra_report(r: &mut Report, a: &FiniteBao) -> Result<Outcome> {
    let rep = ra_atom_axioms(a)?;
    for (name, ok) in &rep.conditions {
        r.verdict(name, ok);
    }
    r.witness("first_failure", &rep.first_failure);
    Ok(Outcome::from_bool(rep.holds()))
}

fn check(c: &Check, r: &mut Report) -> Result<Outcome> {
    match c {
        Check::Axioms {
            input,
            variety: v,
            exhaustive,
            trials,
        } => {
            let a = load(r, input)?;
            match variety(v)? {
                ("ra", _) => ra_report(r, &a),
                ("ca", n) => {
                    let rep = check_variety(&a, &ca_axioms(n), mode(r, *exhaustive, *trials))?;
                    r.lap("check");
                    Ok(record_variety(r, &rep))
                }
                (other, _) => bail!("no equational axioms for {other}"),
            }
        }
        Check::Correspondents { input, variety: v } => {
            let a = load(r, input)?;
            let (name, n) = variety(v)?;
            if name == "ra" {
                return ra_report(r, &a);
            }
            let mut reports = vec![("ca", ca_frame_correspondents(a.frame(), n)?)];
            if name == "pea" {
                reports.push(("pea", pea_frame_checks(a.frame(), n)?));
            }
            let mut ok = true;
            for (label, rep) in &reports {
                r.verdict(&format!("{label}_checked"), &rep.checked);
                r.verdict(&format!("{label}_holds"), rep.holds());
                if !rep.holds() {
                    r.witness(&format!("{label}_violations"), &rep.violations);
                }
                ok &= rep.holds();
            }
            Ok(Outcome::from_bool(ok))
        }
        Check::Hyperbasis {
            n,
            r: rr,
            psi,
            nodes,
            width,
            lambda,
        } => {
            let a = hh_algebra(*n, *rr, *psi)?;
            let set = enumerate_hypernetworks(&a, *nodes, *width, *lambda)?;
            r.lap("enumerate");
            let rep = is_hyperbasis(&set)?;
            let symmetric = is_symmetric(&set);
            r.lap("check");
            r.verdict("network_count", set.len());
            for c in &rep.clauses {
                r.verdict(&format!("clause_{}", c.clause), c.holds);
            }
            r.verdict("symmetric", symmetric);
            if let Some(f) = rep.first_failure() {
                r.witness("first_failure", f);
            }
            Ok(Outcome::from_bool(rep.holds() && symmetric))
        }
        Check::Quasiprojections {
            input,
            p,
            q,
            literal,
        } => {
            let a = load(r, input)?;
            let reading = if *literal {
                AxiomReading::Literal
            } else {
                AxiomReading::Standard
            };
            r.verdict("reading", reading);
            match (p, q) {
                (Some(p), Some(q)) => {
                    let rep =
                        check_quasiprojections(&a, &element(&a, p)?, &element(&a, q)?, reading)?;
                    for (name, ok) in &rep.axioms {
                        r.verdict(name, ok);
                    }
                    Ok(Outcome::from_bool(rep.holds()))
                }
                (None, None) => {
                    let found = find_quasiprojections(&a, reading)?;
                    r.verdict("found", found.is_some());
                    if let Some((p, q)) = &found {
                        r.witness("p", p.as_vec());
                        r.witness("q", q.as_vec());
                    }
                    Ok(Outcome::from_bool(found.is_some()))
                }
                _ => bail!("give both --p and --q, or neither to search"),
            }
        }
    }
}

fn template(r: &mut Report, path: Option<&Path>) -> Result<SchemaTemplate> {
    match path {
        Some(p) => {
            let text = r.read(p)?;
            let t: SchemaTemplate =
                serde_json::from_str(&text).with_context(|| format!("loading {}", p.display()))?;
            t.validate()?;
            Ok(t)
        }
        None => Ok(ca_schema()),
    }
}

fn schema(s: &Schema, r: &mut Report) -> Result<Outcome> {
    match s {
        Schema::Instantiate {
            n,
            template: t,
            out,
        } => {
            let t = template(r, t.as_deref())?;
            let eqs: Vec<Equation> = instantiate_schema(&t, *n)?;
            r.verdict("equations", eqs.len());
            let text: Vec<String> = eqs.iter().map(ToString::to_string).collect();
            match out {
                Some(path) => {
                    let mut body = serde_json::to_string_pretty(&text)?;
                    body.push('\n');
                    r.write(path, &body)?;
                }
                None => r.witness("instances", text),
            }
            Ok(Outcome::Pass)
        }
        Schema::Check {
            input,
            n,
            template: t,
            exhaustive,
            trials,
        } => {
            let a = load(r, input)?;
            let t = template(r, t.as_deref())?;
            let eqs = instantiate_schema(&t, *n)?;
            let rep = check_variety(&a, &eqs, mode(r, *exhaustive, *trials))?;
            r.lap("check");
            Ok(record_variety(r, &rep))
        }
    }
}

fn qra(q: &Qra, r: &mut Report) -> Result<Outcome> {
    match q {
        Qra::Terms { n, verbatim } => {
            let reading = if *verbatim {
                TermReading::Verbatim
            } else {
                TermReading::Converse
            };
            let terms = qra_terms(*n, reading)?;
            r.verdict("reading", reading);
            let named: std::collections::BTreeMap<String, String> = terms
                .named(reading)
                .into_iter()
                .map(|(k, t)| (k, t.to_string()))
                .collect();
            r.witness("terms", named);
            Ok(Outcome::Pass)
        }
        Qra::Check {
            input,
            p,
            q,
            n,
            literal,
            verbatim,
        } => {
            let axioms = if *literal {
                AxiomReading::Literal
            } else {
                AxiomReading::Standard
            };
            let terms = if *verbatim {
                TermReading::Verbatim
            } else {
                TermReading::Converse
            };
            let ctx = match input {
                None => {
                    let t = trivial_qra();
                    QraContext::with_readings(t.algebra, t.p, t.q, axioms, terms)?
                }
                Some(path) => {
                    let a = load(r, path)?;
                    let (Some(p), Some(q)) = (p, q) else {
                        bail!("--p and --q are required with --input")
                    };
                    let (p, q) = (element(&a, p)?, element(&a, q)?);
                    let rep = check_quasiprojections(&a, &p, &q, axioms)?;
                    if !rep.holds() {
                        r.verdict("quasiprojections", false);
                        r.witness("failed_axiom", rep.first_failure());
                        return Ok(Outcome::Fail);
                    }
                    QraContext::with_readings(a, p, q, axioms, terms)?
                }
            };
            r.verdict("quasiprojections", true);
            let bn = build_bn(&ctx, *n)?;
            r.verdict("bn_size", bn.size());
            r.verdict("closed", bn.closed());
            r.verdict("ca_holds", bn.ca.as_ref().map(|c| c.holds()));
            r.verdict("suc_pred", bn.suc_pred);
            let failed: Vec<&String> = bn
                .closure
                .iter()
                .filter(|(_, ok)| !ok)
                .map(|(n, _)| n)
                .collect();
            if !failed.is_empty() {
                r.witness("closure_failures", failed);
            }
            let ok = bn.closed() && bn.ca.as_ref().is_some_and(|c| c.holds()) && bn.suc_pred;
            Ok(Outcome::from_bool(ok))
        }
    }
}
