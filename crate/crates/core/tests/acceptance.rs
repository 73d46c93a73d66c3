//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.
//!
//! `QSLICE_ACCEPT_SEEDS` overrides the number of seeds per case (default 50).

use std::process::ExitCode;
use std::time::Instant;

use qslice_core::flags::{self, FlagError};
use qslice_core::harness::{self, GenMode, Report};
use qslice_core::linalg;
use qslice_core::par::{self, Exec};
use qslice_core::phi::{self, BlockKind, Slot};
use qslice_core::quiver::{self, composite_delta, composite_gamma, ZeroSide};
use qslice_core::sample;
use qslice_core::weight::{self, DimData};
use qslice_core::Partition;

type Verdict = Result<String, String>;

fn seeds() -> u64 {
    std::env::var("QSLICE_ACCEPT_SEEDS").ok().and_then(|s| s.parse().ok()).unwrap_or(50)
}

fn tally_ok(report: &Report, names: &[&str]) -> Verdict {
    let mut parts = Vec::new();
    for name in names {
        let t = report.tally(name);
        if t.failed > 0 {
            let first = report.failures().find(|f| f.invariant == *name);
            return Err(format!(
                "{name}: {} failed; first {}",
                t.failed,
                first.map(|f| format!("{} ({})", f.replay, f.message)).unwrap_or_default()
            ));
        }
        if t.passed == 0 {
            return Err(format!("{name}: nothing checked"));
        }
        parts.push(format!("{name} {}", t.passed));
    }
    Ok(parts.join(", "))
}

fn embedding(r: &Report) -> Verdict {
    let modes = [GenMode::General, GenMode::Lagrangian];
    for m in modes {
        let n = r.cases.iter().filter(|c| c.key.starts_with(m.name())).map(|c| c.samples).sum::<usize>();
        if n == 0 {
            return Err(format!("no {} samples", m.name()));
        }
    }
    tally_ok(r, &["embedding", "filtration"])
}

fn stability(r: &Report) -> Verdict {
    let stable: usize = r.cases.iter().map(|c| c.stable).sum();
    let unstable: usize = r.cases.iter().map(|c| c.unstable).sum();
    if stable == 0 || unstable == 0 {
        return Err(format!("stable {stable}, unstable {unstable}"));
    }
    tally_ok(r, &["stability"]).map(|s| format!("{s} ({stable} stable, {unstable} unstable)"))
}

fn comb(r: &Report) -> Verdict {
    let c = r.comb.as_ref().ok_or("no comb scan")?;
    match c.disagreements.first() {
        Some(d) => Err(format!("{} disagreements; first {d}", c.disagreements.len())),
        None => Ok(format!("{} dims, {} nonempty", c.cases, c.nonempty)),
    }
}

fn positivity() -> Verdict {
    let mut entries = 0;
    for n in 2..=6 {
        let table = phi::coefficient_tables(n);
        if let Some(v) = table.positivity_violations().first() {
            return Err(format!("n = {n}: {v}"));
        }
        entries += table.entries.len();
    }
    // with one side zero each positive-degree block is a single monomial
    let dd = DimData::new(5, vec![1, 2, 1, 1], vec![2, 2, 2, 1]).unwrap();
    let table = phi::coefficient_tables(5);
    let mut nonzero = 0;
    for seed in 0..8 {
        for side in [ZeroSide::A, ZeroSide::B] {
            let z = quiver::gen_one_sided(&dd, seed, side).map_err(|e| e.to_string())?;
            let t = phi::phi(&z).map_err(|e| e.to_string())?;
            for e in &table.entries {
                let (r, j, jp) = (e.r as usize, e.j, e.jp);
                let mono = composite_delta(&z, r, j).mul(&composite_gamma(&z, jp, r));
                let (tgt, src) = (Slot::D { j, k: e.h }, Slot::D { j: jp, k: e.hp });
                let block = match e.kind {
                    BlockKind::T => t.t_block(e.i, tgt, src),
                    BlockKind::S => t.s_block(e.i, tgt, src),
                };
                if block != mono.scale(&e.value) {
                    return Err(format!("probe mismatch at {e:?}, seed {seed}"));
                }
                nonzero += usize::from(!mono.is_zero());
            }
        }
    }
    if nonzero == 0 {
        return Err("probes never exercised a nonzero monomial".into());
    }
    Ok(format!("{entries} coefficients, {nonzero} nonzero probes"))
}

fn path_algebra(r: &Report) -> Verdict {
    let suite = tally_ok(r, &["theta", "generators", "multiplicativity"])?;
    let dd = DimData::new(5, vec![1, 1, 1, 1], vec![2, 3, 2, 1]).unwrap();
    let mut pairs = 0;
    for seed in 0..4 {
        let z = quiver::gen_general(&dd, seed, None).map_err(|e| e.to_string())?;
        harness::multiplicativity_checks(&z, 50, seed)?;
        pairs += 50;
    }
    Ok(format!("{suite}; {pairs} extra pairs"))
}

fn compositions(total: usize, len: usize) -> Vec<Vec<usize>> {
    harness::tuples(len, 0, total as i64)
        .into_iter()
        .filter(|t| t.iter().sum::<i64>() == total as i64)
        .map(|t| t.into_iter().map(|x| x as usize).collect())
        .collect()
}

fn flag_case() -> Verdict {
    let mut types = Vec::new();
    for big_n in 1..=8 {
        for len in 2..=4 {
            types.extend(compositions(big_n, len));
        }
    }
    let jobs: Vec<(Vec<usize>, u64)> = types.iter().flat_map(|a| (0..2).map(move |s| (a.clone(), s))).collect();
    let results = par::map(Exec::from_env(), &jobs, |(a, seed)| -> Result<(), String> {
        let fail = |m: &str| format!("a = {a:?}, seed {seed}: {m}");
        let p = flags::gen_flag_pair(a, *seed);
        let z = flags::data_of_flag(&p).map_err(|e| fail(&e.to_string()))?;
        let a_of: Vec<i64> = weight::a_of(&z.dims);
        if a_of != a.iter().map(|&x| x as i64).collect::<Vec<_>>() {
            return Err(fail("wrong dimension vector"));
        }
        if flags::flag_of_data(&z).map_err(|e| fail(&e.to_string()))? != p {
            return Err(fail("flag -> data -> flag changed the pair"));
        }
        let w = flags::data_of_flag(&flags::flag_of_data(&z).unwrap()).unwrap();
        let g = flags::gauge_to_normal_form(&z).map_err(|e| fail(&e.to_string()))?;
        if quiver::act(&g, &z).map_err(|e| fail(&e.to_string()))? != w {
            return Err(fail("data -> flag -> data left the orbit"));
        }
        if !quiver::check_stable_criterion(&z).unwrap() {
            return Err(fail("data of a flag is unstable"));
        }
        let t = phi::phi(&z).map_err(|e| fail(&e.to_string()))?;
        if !phi::tilde_stability(&t).unwrap() {
            return Err(fail("tilde data not stable"));
        }
        if phi::slice_point(&t).unwrap() != p.u {
            return Err(fail("slice point differs from u"));
        }
        Ok(())
    });
    if let Some(e) = results.into_iter().find_map(Result::err) {
        return Err(e);
    }
    // unstable data with this framing is rejected, and the tilde side agrees
    let mut unstable = 0;
    for (d, v) in [(vec![2, 0], vec![1, 0]), (vec![3, 0, 0], vec![2, 1, 0]), (vec![3, 0], vec![2, 2])] {
        let dd = DimData::new(d.len() + 1, d, v).unwrap();
        for seed in 0..10 {
            let Some(z) = harness::sample_data(&dd, GenMode::General, seed).map_err(|e| e.to_string())? else { continue };
            if quiver::check_stable_criterion(&z).unwrap() {
                continue;
            }
            unstable += 1;
            if flags::flag_of_data(&z) != Err(FlagError::NotStable) {
                return Err(format!("{}#{seed}: unstable data not rejected", dd.key()));
            }
            if phi::tilde_stability(&phi::phi(&z).unwrap()).unwrap() {
                return Err(format!("{}#{seed}: tilde side reports stable", dd.key()));
            }
        }
    }
    if unstable == 0 {
        return Err("no unstable samples".into());
    }
    Ok(format!("{} flag pairs over {} types, {unstable} unstable rejected", jobs.len(), types.len()))
}

fn oracles(r: &Report) -> Verdict {
    let mut count = 0;
    let mut rng = sample::rng(7);
    for size in 0..=8 {
        for lambda in Partition::all(size) {
            let expected = lambda.centralizer_formula();
            let u = linalg::standard_nilpotent(&lambda);
            if linalg::centralizer_dim(&u) != expected || linalg::standard_centralizer_dim(&lambda) != expected {
                return Err(format!("centralizer of {lambda}"));
            }
            let p = sample::invertible(&mut rng, size, 2);
            let conj = p.mul(&u).mul(&p.inverse().unwrap());
            if linalg::centralizer_dim(&conj) != expected {
                return Err(format!("centralizer of a conjugate of {lambda}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} partitions; {}", tally_ok(r, &["stability_agree"])?))
}

fn main() -> ExitCode {
    let seeds = seeds();
    let start = Instant::now();
    let spec = harness::default_suite(seeds);
    let cases = spec.cases.len();
    let report = harness::run_suite(&spec);
    println!("default matrix: {cases} cases x {seeds} seeds in {:.1}s", start.elapsed().as_secs_f64());

    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict>)> = vec![
        ("1 embedding", Box::new(|| embedding(&report))),
        ("2 roundtrip", Box::new(|| tally_ok(&report, &["roundtrip"]))),
        ("3 stability transfer", Box::new(|| stability(&report))),
        ("4 equivariance", Box::new(|| tally_ok(&report, &["equivariance"]))),
        ("5 slice membership", Box::new(|| tally_ok(&report, &["slice", "zero"]))),
        ("6 combinatorial dictionary", Box::new(|| comb(&report))),
        ("7 coefficient positivity", Box::new(positivity)),
        ("8 path algebra", Box::new(|| path_algebra(&report))),
        ("9 flag case", Box::new(flag_case)),
        ("10 oracle cross-checks", Box::new(|| oracles(&report))),
    ];
    let mut all = true;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                all = false;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
