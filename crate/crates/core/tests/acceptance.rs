//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use predprey_core::bifurcation::{find_hopf, Criticality};
use predprey_core::manifolds::ScanConfig;
use predprey_core::presets::{fig2_params, fig3a_params, fig3b_params, harvest_params, reproduce, Check, Report};
use predprey_core::{IntegratorConfig, Param, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;

struct Verdict {
    pass: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn from_checks<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Verdict {
        let mut v = Verdict { pass: true, lines: Vec::new() };
        for c in checks {
            v.pass &= c.pass;
            v.lines.push(format!("{} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail));
        }
        v
    }

    fn add(&mut self, name: &str, outcome: Result<String, String>) {
        let (ok, text) = match outcome {
            Ok(t) => (true, t),
            Err(t) => (false, t),
        };
        self.pass &= ok;
        self.lines.push(format!("{} {name}: {text}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn report(id: &str) -> Report {
    reproduce(id, &IntegratorConfig::default()).unwrap_or_else(|e| panic!("reproduce {id}: {e}"))
}

fn named<'a>(r: &'a Report, names: &[&str]) -> Vec<&'a Check> {
    r.checks.iter().filter(|c| names.iter().any(|n| c.name.starts_with(n))).collect()
}

fn criterion_6() -> Verdict {
    let mut v = Verdict { pass: true, lines: Vec::new() };
    for (label, params, interval) in [
        ("fig3a", fig3a_params(0.0), (10.0, 20.0)),
        ("fig3b", fig3b_params(0.0), (0.0, 0.1)),
    ] {
        let l = find_hopf(&params, Param::K, interval).ok().and_then(|s| s.points.first().and_then(|h| h.l1()));
        v.add(&format!("{label} L > 0"), match l {
            Some(l) if l > 0.0 => Ok(format!("L = {l:.6}")),
            other => Err(format!("L = {other:?}")),
        });
    }
    let crit = find_hopf(&harvest_params(0.0), Param::Q, (0.0, 0.5))
        .ok()
        .and_then(|s| s.points.first().and_then(|h| h.criticality()));
    v.add("harvest criticality Sub (L > 0)", match crit {
        Some(Criticality::Sub) => Ok("return map grows".into()),
        other => Err(format!("{other:?}")),
    });
    let l_at = |a: f64| {
        find_hopf(&fig3a_params(0.0).with(Param::A, a), Param::K, (10.0, 20.0))
            .ok()
            .and_then(|s| s.points.first().and_then(|h| h.l1()))
            .unwrap_or(f64::NAN)
    };
    let l0 = l_at(2.5);
    let jumps: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|e| (l_at(2.5 + e) - l0).abs()).collect();
    let shrinking = jumps.windows(2).all(|w| w[1] < w[0]) && jumps[2] < 1e-2;
    let jumps = jumps.iter().map(|j| format!("{j:.2e}")).collect::<Vec<_>>().join(", ");
    v.add("L continuous under perturbation of a", if shrinking {
        Ok(format!("|dL| = {jumps}"))
    } else {
        Err(format!("|dL| = {jumps}"))
    });
    v
}

fn tally(name: &str, total: usize, result: impl FnMut(usize) -> Result<(), String>) -> Result<String, String> {
    let failures: Vec<String> = (0..total).map(result).filter_map(Result::err).collect();
    match failures.first() {
        None => Ok(format!("{total}/{total}")),
        Some(first) => Err(format!("{}/{total} failed {name}; first: {first}", failures.len())),
    }
}

fn criterion_10() -> Verdict {
    let mut v = Verdict { pass: true, lines: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cfg = IntegratorConfig::default();

    let cases: Vec<_> = (0..1000)
        .map(|_| {
            let p = random_params(&mut rng, true);
            (p, State::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)))
        })
        .collect();
    let short = cfg.with_t_end(30.0);
    v.add("(i) nonnegativity", tally("nonnegativity", cases.len(), |i| check_nonnegative(&cases[i].0, cases[i].1, &short)));

    let cases: Vec<_> = (0..100)
        .map(|_| {
            let p = random_params(&mut rng, false).with(Param::K, 0.0);
            let s0 = State::new(rng.gen_range(1.01..3.0) * p.carrying_capacity(), rng.gen_range(0.01..5.0));
            (p, s0)
        })
        .collect();
    let long = cfg.with_t_end(200.0);
    v.add("(ii) dissipativity", tally("dissipativity", cases.len(), |i| check_dissipative(&cases[i].0, cases[i].1, &long)));

    let cases: Vec<_> = (0..100)
        .map(|_| (random_params(&mut rng, true), State::new(rng.gen_range(0.2..8.0), rng.gen_range(0.2..8.0))))
        .collect();
    v.add("(iii) jacobian vs finite differences", tally("jacobian", 100, |i| check_jacobian_fd(&cases[i].0, cases[i].1)));

    let mut sets: Vec<_> = (0..200).map(|_| random_params(&mut rng, false)).collect();
    sets.extend((0..100).map(|_| random_family_member(&mut rng)));
    v.add("(iv) j22 = -d(1-m)", tally("coexistence identities", sets.len(), |i| check_coexistence_identities(&sets[i])));
    v.add("    closed form vs newton", tally("newton agreement", 50, |i| check_newton_agreement(&sets[i])));

    let hopf: Vec<_> = (0..10)
        .flat_map(|i| {
            let s = 0.95 + 0.01 * i as f64;
            [
                (fig3a_params(0.0).with(Param::A, 2.5 * s), Param::K, (0.0, 50.0)),
                (fig3b_params(0.0).with(Param::A, 2.0 * s), Param::K, (0.0, 1.0)),
                (harvest_params(0.0).with(Param::A, 3.0 * s), Param::Q, (0.0, 0.5)),
            ]
        })
        .collect();
    let mut seen = 0;
    let outcome = tally("hopf checks", hopf.len(), |i| {
        let (p, param, interval) = hopf[i];
        check_hopf_points(&p, param, interval).map(|n| seen += n)
    });
    v.add("(v) hopf outputs", outcome.map(|t| format!("{t} sets, {seen} points")));

    let scan = ScanConfig { v_max: Some(24.0), ..ScanConfig::default() };
    let mut points = 0;
    let outcome = tally("two-sidedness", 2, |i| {
        check_two_sided(&fig2_params([0.0, 0.03][i]), &scan, &cfg).map(|n| points += n)
    });
    v.add("(vi) separatrix two-sided", outcome.map(|t| format!("{t} separatrices, {points} points")));

    let family: Vec<_> = (0..300).map(|_| random_family_member(&mut rng)).collect();
    v.add("(vii) remark 3.5 counts", tally("counts", family.len(), |i| check_equilibrium_count(&family[i])));
    v
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("saddle-node in k", Box::new(|| Verdict::from_checks(&report("fig2").checks))),
        ("saddle-node in b, c, d", Box::new(|| {
            let rs: Vec<Report> = ["fig9b", "fig9c", "fig9d"].iter().map(|id| report(id)).collect();
            Verdict::from_checks(rs.iter().flat_map(|r| r.checks.iter()))
        })),
        ("hopf in k, case (a)", Box::new(|| Verdict::from_checks(&report("fig3a").checks))),
        ("hopf in k, case (b)", Box::new(|| Verdict::from_checks(&report("fig3b").checks))),
        ("hopf in q", Box::new(|| {
            let r = report("fig7");
            Verdict::from_checks(named(&r, &["q_h", "E2", "det", "dS/dq"]))
        })),
        ("lyapunov sign and continuity", Box::new(criterion_6)),
        ("finite-time extinction", Box::new(|| Verdict::from_checks(&report("fig6").checks))),
        ("homoclinic brackets", Box::new(|| {
            let (r5, r8) = (report("fig5"), report("fig8"));
            Verdict::from_checks(named(&r5, &["k* bracket"]).into_iter().chain(named(&r8, &["q* bracket"])))
        })),
        ("manifold ordering", Box::new(|| {
            let (r5, r8) = (report("fig5"), report("fig8"));
            Verdict::from_checks(named(&r5, &["k=0"]).into_iter().chain(named(&r8, &["q=0", "q=1"])))
        })),
        ("property suite", Box::new(criterion_10)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {:>2}: {name} ({:.1?})", i + 1, start.elapsed());
        for line in &verdict.lines {
            println!("        {line}");
        }
        failed += usize::from(!verdict.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
