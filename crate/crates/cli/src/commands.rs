use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};

use cdtools::compress::{compress as compress_term, reduce, to_combinators, DEFAULT_STEP_CAP};
use cdtools::dterm::{dims, print_dnotation, DTerm, DTermDag};
use cdtools::enumerate::{GeneratorKind, Generator, Mode};
use cdtools::formula::SymbolTable;
use cdtools::kernel;
use cdtools::mgt::{mgt, n_simplify, verify as verify_proof, AxiomBase};
use cdtools::problem::{print_meredith, read_cd_problem, ReadError, Registry};
use cdtools::sgcd::{search, GoalStatus, Preset, SearchError, SearchOutcome};

use crate::input::{align, load_problem, load_proofs, read_file, relabel, Problem};
use crate::settings::Settings;
use crate::{
    CliError, CompressArgs, CompressTarget, DetectArgs, EnumerateArgs, InspectArgs, ProofFormat, ProveArgs,
    VerifyArgs,
};

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_search(problem: &Problem, settings: &Settings, cancel: Option<Arc<AtomicBool>>) -> Result<SearchOutcome, CliError> {
    let (mut cfg, policy) = settings.build(problem.goals.clone())?;
    cfg.cancel = cancel;
    search(&problem.axioms, &cfg, &policy).map_err(|e| match e {
        SearchError::Config(m) => CliError::Input(m),
        e @ SearchError::Unsound { .. } => CliError::Internal(e.to_string()),
    })
}

/// Runs one search per preset on its own thread. The first run that proves
/// every goal cancels the others; otherwise the first preset's outcome is
/// reported.
fn run_portfolio(problem: &Problem, base: &Settings, names: &[String]) -> Result<(String, SearchOutcome), CliError> {
    let mut runs = Vec::new();
    for n in names {
        let preset: Preset = n.parse().map_err(CliError::Input)?;
        let own = Settings { preset: Some(preset), ..Default::default() };
        runs.push((preset, Settings { preset: None, ..base.clone() }.overlay(&own)));
    }
    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for (i, (_, settings)) in runs.iter().enumerate() {
            let (tx, cancel) = (tx.clone(), cancel.clone());
            s.spawn(move || {
                let r = run_search(problem, settings, Some(cancel.clone()));
                if matches!(&r, Ok(o) if o.all_proved()) {
                    cancel.store(true, Ordering::Relaxed);
                }
                let _ = tx.send((i, r));
            });
        }
    });
    drop(tx);
    let mut results: Vec<(usize, Result<SearchOutcome, CliError>)> = rx.into_iter().collect();
    let winner = results.iter().position(|(_, r)| matches!(r, Ok(o) if o.all_proved()));
    let pick = match winner {
        Some(w) => w,
        None => results.iter().position(|(i, _)| *i == 0).expect("first preset ran"),
    };
    let (i, r) = results.swap_remove(pick);
    log::info!("portfolio result from {}", runs[i].0.name());
    Ok((runs[i].0.name().to_string(), r?))
}

pub fn prove(a: &ProveArgs) -> Result<u8, CliError> {
    let problem = load_problem(a.problem.problem.as_deref(), &a.problem.axioms, &a.problem.goals)?;
    if problem.goals.is_empty() {
        return Err(CliError::Input("no goal given".into()));
    }
    let settings = a.search.settings()?;
    let (label, outcome) = if a.portfolio.is_empty() {
        let name = settings.preset.unwrap_or(Preset::Sgcd1).name().to_string();
        (name, run_search(&problem, &settings, None)?)
    } else {
        run_portfolio(&problem, &settings, &a.portfolio)?
    };

    let mut proofs = Vec::new();
    let mut stats = String::new();
    let _ = writeln!(stats, "problem\t{}", problem.name);
    let _ = writeln!(stats, "configuration\t{label}");
    for r in &outcome.goals {
        let goal = problem.axioms.polish(&r.goal);
        match &r.status {
            GoalStatus::Proved { proof, level, phase, .. } => {
                if !verify_proof(proof, &problem.axioms, &r.goal).passed()
                    || !kernel::check(proof, &problem.axioms, &r.goal)
                {
                    return Err(CliError::Internal(format!("proof of {goal} failed re-verification")));
                }
                let _ = writeln!(stats, "goal\t{goal}\tproved\tlevel={level}\tphase={phase:?}\t{}", dims(std::slice::from_ref(proof)));
                proofs.push(proof.clone());
                proofs.extend(r.alternates.iter().cloned());
            }
            GoalStatus::NotProved(reason) => {
                let _ = writeln!(stats, "goal\t{goal}\tnot-proved\t{reason}");
                eprintln!("cdt: not proved: {goal} ({reason})");
            }
        }
    }
    stats.push_str(&outcome.stats.to_kv());

    let primary = match a.format {
        ProofFormat::Dterm => proofs.iter().map(|d| format!("{}\n", print_dnotation(d))).collect(),
        ProofFormat::Meredith if proofs.is_empty() => String::new(),
        ProofFormat::Meredith => print_meredith(&problem.axioms, &proofs),
        ProofFormat::Grammar => {
            let grammars: Vec<String> = proofs.iter().map(|d| compress_term(d, 10_000).to_string()).collect();
            grammars.join("\n")
        }
        ProofFormat::Comb => {
            let mut out = String::new();
            for d in &proofs {
                let c = comb_of(&compress_term(d, 10_000), d)?;
                let _ = writeln!(out, "{c}");
            }
            out
        }
        ProofFormat::Stats => stats.clone(),
    };
    write_out(a.output.as_deref(), &primary)?;
    if a.format != ProofFormat::Stats {
        match &a.stats {
            Some(p) => fs::write(p, &stats).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
            None => eprint!("{stats}"),
        }
    }
    Ok(if outcome.all_proved() { 0 } else { 1 })
}

/// Converts `g` and checks that the result reduces back to `d`.
fn comb_of(g: &cdtools::compress::Grammar, d: &DTerm) -> Result<Arc<cdtools::compress::CombTerm>, CliError> {
    let c = to_combinators(g).map_err(|e| CliError::Internal(format!("combinator conversion: {e}")))?;
    let (back, _) = reduce(&c, DEFAULT_STEP_CAP).map_err(|e| CliError::Internal(format!("reduction: {e}")))?;
    if &back != d {
        return Err(CliError::Internal("combinator term does not reduce to the proof".into()));
    }
    Ok(c)
}

/// `n` becomes the first axiom, or axiom 1 when no axioms are known.
fn filled(terms: &[DTerm], axioms: Option<&AxiomBase>) -> Vec<DTerm> {
    terms
        .iter()
        .map(|d| match axioms {
            Some(a) => a.fill_n(d),
            None => d.replace_n(&DTerm::axiom(1)),
        })
        .collect()
}

pub fn verify(a: &VerifyArgs) -> Result<u8, CliError> {
    let proofs = load_proofs(&a.proof)?;
    let mut out = String::new();
    let passed = match &a.problem {
        Some(path) => {
            let problem = load_problem(Some(path), &[], &[])?;
            let terms = match &proofs.axioms {
                Some(own) => {
                    let map = align(own, &problem.axioms);
                    let mut v = Vec::new();
                    for d in &proofs.terms {
                        v.push(relabel(d, &map).map_err(|id| {
                            CliError::Input(format!("axiom {id} of the proof is not an axiom of the problem"))
                        })?);
                    }
                    v
                }
                None => proofs.terms.clone(),
            };
            let _ = writeln!(out, "dims\t{}", dims(&filled(&terms, Some(&problem.axioms))));
            let mut all = true;
            for goal in &problem.goals {
                let g = problem.axioms.polish(goal);
                let hit = terms.iter().position(|d| {
                    verify_proof(d, &problem.axioms, goal).passed() && kernel::check(d, &problem.axioms, goal)
                });
                match hit {
                    Some(i) => {
                        let _ = writeln!(out, "goal\t{g}\tpass\tproof {}", i + 1);
                    }
                    None => {
                        all = false;
                        let _ = writeln!(out, "goal\t{g}\tfail");
                        for d in &terms {
                            out.push_str(&verify_proof(d, &problem.axioms, goal).render(problem.axioms.symbols()));
                        }
                    }
                }
            }
            all
        }
        None => {
            let axioms = proofs
                .axioms
                .as_ref()
                .ok_or_else(|| CliError::Input("this proof file states no axioms; give a problem file".into()))?;
            let _ = writeln!(out, "dims\t{}", dims(&filled(&proofs.terms, Some(axioms))));
            let mut all = true;
            for (i, d) in proofs.terms.iter().enumerate() {
                let ok = match (mgt(d, axioms), kernel::replay(d, axioms)) {
                    (Ok(m), Ok(r)) => {
                        let _ = writeln!(out, "proof {}\t{}\tpass", i + 1, axioms.polish(&m.conclusion));
                        m.conclusion.subsumes(&r)
                    }
                    _ => {
                        let _ = writeln!(out, "proof {}\tfail", i + 1);
                        false
                    }
                };
                all &= ok;
            }
            all
        }
    };
    let _ = writeln!(out, "result\t{}", if passed { "pass" } else { "fail" });
    print!("{out}");
    Ok(if passed { 0 } else { 1 })
}

pub fn enumerate(a: &EnumerateArgs) -> Result<u8, CliError> {
    let problem = load_problem(a.problem.problem.as_deref(), &a.problem.axioms, &a.problem.goals)?;
    let kind: GeneratorKind = a.generator.parse().map_err(CliError::Input)?;
    let levels = match (a.level, a.max_level) {
        (Some(l), _) => l..=l,
        (None, Some(m)) => 0..=m,
        (None, None) => return Err(CliError::Input("give --level or --max-level".into())),
    };
    let mode = match problem.goals.as_slice() {
        [] => Mode::AxiomDriven,
        [g] => Mode::GoalDriven(g.clone()),
        _ => return Err(CliError::Input("enumerate takes at most one goal".into())),
    };
    let mut generator = Generator::new(kind, &problem.axioms);
    let mut out = String::new();
    for level in levels {
        let (found, _) = generator.collect(level, &mode);
        for (d, f) in found {
            let check = mgt(&d, &problem.axioms).map(|m| m.conclusion);
            if check.as_ref() != Ok(&f.normalized()) {
                return Err(CliError::Internal(format!("MGT mismatch for {}", print_dnotation(&d))));
            }
            let _ = writeln!(out, "{level}\t{}\t{}", print_dnotation(&d), problem.axioms.polish(&f));
        }
    }
    print!("{out}");
    Ok(0)
}

pub fn compress(a: &CompressArgs) -> Result<u8, CliError> {
    let proofs = load_proofs(&a.proof)?;
    let terms = filled(&proofs.terms, proofs.axioms.as_ref());
    let mut out = String::new();
    match a.target {
        CompressTarget::Dag => out = DTermDag::compact(&terms).edge_list(),
        CompressTarget::Grammar => {
            for (i, d) in terms.iter().enumerate() {
                let g = compress_term(d, a.rounds);
                if g.expand().ok().as_ref() != Some(d) {
                    return Err(CliError::Internal("grammar does not expand to the proof".into()));
                }
                eprintln!("proof {}: {} -> grammar size {}", i + 1, dims(std::slice::from_ref(d)), g.size());
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&g.to_string());
            }
        }
        CompressTarget::Comb => {
            for (i, d) in terms.iter().enumerate() {
                let g = match &proofs.grammar {
                    Some(g) => g.clone(),
                    None => compress_term(d, a.rounds),
                };
                let c = comb_of(&g, d)?;
                eprintln!("proof {}: {} -> combinator term {}", i + 1, dims(std::slice::from_ref(d)), c.dims());
                let _ = writeln!(out, "{c}");
            }
        }
    }
    print!("{out}");
    Ok(0)
}

pub fn detect(a: &DetectArgs) -> Result<u8, CliError> {
    let text = read_file(&a.problem)?;
    let name = a.problem.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match read_cd_problem(&text, &name) {
        Ok(p) => {
            println!("cd\t{}\taxioms={}\tgoal={}", p.name, p.axioms.len(), p.goal_polish());
            if a.canonical {
                print!("{}", p.to_tptp());
            }
            Ok(0)
        }
        Err(ReadError::NotCd(reason)) => {
            println!("not-cd\t{reason}");
            Ok(1)
        }
        Err(e) => Err(CliError::Input(format!("{}: {e}", a.problem.display()))),
    }
}

pub fn inspect(a: &InspectArgs) -> Result<u8, CliError> {
    let proofs = load_proofs(&a.proof)?;
    let axioms = match (&proofs.axioms, &a.problem) {
        (Some(own), _) => Some(own.clone()),
        (None, Some(p)) => Some(load_problem(Some(p), &[], &[])?.axioms),
        (None, None) => None,
    };
    let mut registry = Registry::bundled();
    if let Some(path) = &a.registry {
        let extra = Registry::load(&read_file(path)?, SymbolTable::standard())
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        for (name, f) in extra.iter() {
            registry.insert(name, f.clone());
        }
    }
    let terms = filled(&proofs.terms, axioms.as_ref());
    let mut out = String::new();
    let _ = writeln!(out, "dims\t{}", dims(&terms));
    if terms.len() > 1 || axioms.is_some() {
        for (i, d) in proofs.terms.iter().enumerate() {
            let _ = writeln!(out, "proof {}\t{}\t{}", i + 1, dims(std::slice::from_ref(&terms[i])), print_dnotation(d));
            let Some(ax) = &axioms else { continue };
            match mgt(&terms[i], ax) {
                Ok(m) => {
                    let _ = writeln!(out, "  mgt\t{}", ax.polish(&m.conclusion));
                    let names = registry.lookup(&m.conclusion);
                    if !names.is_empty() {
                        let _ = writeln!(out, "  names\t{}", names.join(", "));
                    }
                    if let Ok(s) = n_simplify(&terms[i], ax) {
                        let _ = writeln!(out, "  n-simplified\t{}\t{}", dims(std::slice::from_ref(&s)), print_dnotation(&s));
                    }
                }
                Err(e) => {
                    let _ = writeln!(out, "  mgt\tnone ({e})");
                }
            }
        }
    }
    print!("{out}");
    Ok(0)
}
