//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for each,
//! and exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toprank::harness::{
    best_in_hindsight, brute_force_best, fit_slope, run_experiment, AdversaryConfig, AdversaryKind,
    ExperimentConfig, LearnerKind,
};
use toprank::observability::{
    check_global, check_local, neighborhood_set, pair_residual, SpanBasis, Thresholds,
};
use toprank::rtop1f::{run_episode, schedule_block, BlockPlan};
use toprank::{build_game, ExactGame, Game, Measure, Rational, RelevanceVector};

#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.note(format!("{:.2?}", elapsed));
        self.check(
            elapsed <= limit,
            format!("runtime {elapsed:.2?} exceeds {limit:?}"),
        );
    }
}

fn random_stream(rng: &mut ChaCha8Rng, m: usize, t: usize, n: u32) -> Vec<RelevanceVector> {
    (0..t)
        .map(|_| {
            let levels = (0..m).map(|_| rng.random_range(0..=n)).collect();
            RelevanceVector::new(levels, n).unwrap()
        })
        .collect()
}

/// Golden loss and feedback matrices for SumLoss at m = 3.
fn criterion_1(c: &mut Checks) {
    const L: [[u64; 8]; 6] = [
        [0, 3, 2, 5, 1, 4, 3, 6],
        [0, 2, 3, 5, 1, 3, 4, 6],
        [0, 3, 1, 4, 2, 5, 3, 6],
        [0, 1, 3, 4, 2, 3, 5, 6],
        [0, 2, 1, 3, 3, 5, 4, 6],
        [0, 1, 2, 3, 3, 4, 5, 6],
    ];
    const H: [[u8; 8]; 6] = [
        [0, 0, 0, 0, 1, 1, 1, 1],
        [0, 0, 0, 0, 1, 1, 1, 1],
        [0, 0, 1, 1, 0, 0, 1, 1],
        [0, 1, 0, 1, 0, 1, 0, 1],
        [0, 0, 1, 1, 0, 0, 1, 1],
        [0, 1, 0, 1, 0, 1, 0, 1],
    ];
    let start = Instant::now();
    let game: ExactGame = build_game(Measure::SumLoss, 3).unwrap();
    let elapsed = start.elapsed();
    let names: Vec<String> = game.actions().iter().map(|a| a.to_string()).collect();
    c.check(
        names == ["123", "132", "213", "231", "312", "321"],
        format!("action order {names:?}"),
    );
    let cols: Vec<String> = game.outcomes().iter().map(|r| r.to_string()).collect();
    c.check(
        cols == ["000", "001", "010", "011", "100", "101", "110", "111"],
        format!("outcome order {cols:?}"),
    );
    let mut mismatches = 0;
    for a in 0..6 {
        for o in 0..8 {
            if *game.loss(a, o) != Rational::from_integer(L[a][o] as i64) {
                mismatches += 1;
            }
            if game.feedback(a, o) != H[a][o] {
                mismatches += 1;
            }
        }
    }
    c.check(
        mismatches == 0,
        format!("{mismatches} of 96 entries differ"),
    );
    c.check(
        *game.loss(2, 3) == Rational::from_integer(4),
        "L[3][4] != 4",
    );
    c.check(game.feedback(2, 3) == 1, "H[3][4] != 1");
    c.note("96/96 entries match");
    c.within(elapsed, Duration::from_secs(1));
}

/// Global observability of SumLoss.
fn criterion_2(c: &mut Checks) {
    let thresholds = Thresholds::default();
    for m in 2..=4 {
        let start = Instant::now();
        let game: Game = build_game(Measure::SumLoss, m).unwrap();
        let global = check_global(&game, &thresholds).unwrap();
        c.check(
            global.holds,
            format!(
                "m={m}: global check fails, worst {:e}",
                global.worst_residual
            ),
        );
        let columns: Vec<Vec<f64>> = (0..game.n_actions())
            .flat_map(|a| game.signal_matrix(a).unwrap().transposed_columns::<f64>())
            .collect();
        let basis = SpanBasis::new(game.n_outcomes(), columns).unwrap();
        let worst = (0..game.n_actions())
            .map(|a| basis.residual(game.loss_row(a)).unwrap())
            .fold(0.0, f64::max);
        c.check(worst <= 1e-9, format!("m={m}: loss row residual {worst:e}"));
        c.note(format!(
            "m={m} worst pair {:.1e} row {worst:.1e}",
            global.worst_residual
        ));
        if m == 4 {
            c.within(start.elapsed(), Duration::from_secs(10));
        }
    }
}

/// Local observability fails for SumLoss at m = 3 on (σ1, σ2).
fn criterion_3(c: &mut Checks) {
    let game: Game = build_game(Measure::SumLoss, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let hood = neighborhood_set(&game, 0, 1, 256, &mut rng).unwrap();
    c.check(
        hood == BTreeSet::from([0, 1]),
        format!("neighborhood {hood:?}"),
    );
    let local = check_local(&game, 0, 1, &hood, &Thresholds::default()).unwrap();
    c.check(!local.observable, "pair reported locally observable");
    c.check(
        local.residual >= 1e-6,
        format!("residual {:e}", local.residual),
    );
    c.note(format!("N+ = {{σ1, σ2}}, residual {:.3}", local.residual));
}

/// Global observability fails for NDCG, MAP (m = 3) and AUC (m = 4) but
/// holds for AUC at m = 3.
fn criterion_4(c: &mut Checks) {
    let start = Instant::now();
    let thresholds = Thresholds::default();
    let all = |g: &Game| 0..g.n_actions();

    // NDCG
    let ndcg: Game = build_game(Measure::Ndcg, 3).unwrap();
    let global = check_global(&ndcg, &thresholds).unwrap();
    c.check(!global.holds, "NDCG m=3: global check holds");
    let l = 3f64.log2();
    let q = l / (2.0 * (1.0 + l));
    let expected = [0.0, -0.5, 0.0, -q, 0.5, 0.0, q, 0.0];
    let diff = ndcg.loss_difference(0, 5);
    let err = diff
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    c.check(err <= 1e-12, format!("NDCG ℓσ1−ℓσ6 off by {err:e}"));
    let res = pair_residual(&ndcg, 0, 5, all(&ndcg)).unwrap();
    c.check(
        res >= thresholds.reject,
        format!("NDCG (σ1,σ6) residual {res:e}"),
    );
    c.note(format!("NDCG res {res:.3}"));

    // MAP, exactly
    let map: ExactGame = build_game(Measure::Map, 3).unwrap();
    let r = |n, d| Rational::new(n, d);
    let expected = vec![
        r(0, 1),
        r(-2, 3),
        r(0, 1),
        r(-5, 12),
        r(2, 3),
        r(0, 1),
        r(5, 12),
        r(0, 1),
    ];
    c.check(
        map.loss_difference(0, 5) == expected,
        "MAP ℓσ1−ℓσ6 differs from the exact vector",
    );
    let map64: Game = build_game(Measure::Map, 3).unwrap();
    c.check(
        !check_global(&map64, &thresholds).unwrap().holds,
        "MAP m=3: global check holds",
    );
    let res = pair_residual(&map64, 0, 5, all(&map64)).unwrap();
    c.check(
        res >= thresholds.reject,
        format!("MAP (σ1,σ6) residual {res:e}"),
    );
    c.note(format!("MAP res {res:.3}"));

    // AUC at m = 4; the published vector lists outcomes by number of relevant objects
    let listed = [
        "0000", "0001", "0010", "0100", "1000", "0011", "0101", "1001", "0110", "1010", "1100",
        "0111", "1011", "1101", "1110", "1111",
    ];
    let published = [
        0.0,
        1.0,
        1.0 / 3.0,
        -1.0 / 3.0,
        -1.0,
        1.0,
        0.5,
        0.0,
        0.0,
        -0.5,
        -1.0,
        1.0,
        1.0 / 3.0,
        -1.0 / 3.0,
        -1.0,
        0.0,
    ];
    let auc: Game = build_game(Measure::Auc, 4).unwrap();
    c.check(
        !check_global(&auc, &thresholds).unwrap().holds,
        "AUC m=4: global check holds",
    );
    let last = auc.n_actions() - 1;
    c.check(auc.actions()[last].to_string() == "4321", "σ24 is not 4321");
    let diff = auc.loss_difference(0, last);
    let mut err = 0.0f64;
    for (name, want) in listed.iter().zip(published) {
        let o = auc
            .outcomes()
            .iter()
            .position(|r| r.to_string() == *name)
            .unwrap();
        err = err.max((diff[o] - want).abs());
    }
    c.check(err <= 1e-12, format!("AUC ℓσ1−ℓσ24 off by {err:e}"));
    let res = pair_residual(&auc, 0, last, all(&auc)).unwrap();
    c.check(
        res >= thresholds.reject,
        format!("AUC (σ1,σ24) residual {res:e}"),
    );
    c.note(format!("AUC4 res {res:.3}"));

    let auc3: Game = build_game(Measure::Auc, 3).unwrap();
    let g3 = check_global(&auc3, &thresholds).unwrap();
    c.check(
        g3.holds,
        format!("AUC m=3: global check fails, worst {:e}", g3.worst_residual),
    );
    c.within(start.elapsed(), Duration::from_secs(30));
}

/// The probed values of a block estimate its average relevance without bias.
fn criterion_5(c: &mut Checks) {
    let (m, block_len, blocks, schedules) = (5, 40, 20, 100_000);
    let plan = BlockPlan {
        horizon: block_len * blocks,
        blocks,
        block_len,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let stream = random_stream(&mut rng, m, plan.horizon, 1);
    let mut worst_z = 0.0f64;
    let mut fails = 0;
    for b in 0..blocks {
        let range = plan.block_range(b);
        let mut sum = [0.0f64; 5];
        let mut sum_sq = [0.0f64; 5];
        for _ in 0..schedules {
            let rounds = schedule_block(&plan, b, m, &mut rng).unwrap();
            for (j, &t) in rounds.iter().enumerate() {
                let v = f64::from(stream[t].level(j));
                sum[j] += v;
                sum_sq[j] += v * v;
            }
        }
        for j in 0..m {
            let target = range
                .clone()
                .map(|t| f64::from(stream[t].level(j)))
                .sum::<f64>()
                / block_len as f64;
            let n = schedules as f64;
            let mean = sum[j] / n;
            let var = (sum_sq[j] / n - mean * mean).max(0.0);
            let se = (var / n).sqrt();
            let dev = (mean - target).abs();
            if se > 0.0 {
                worst_z = worst_z.max(dev / se);
            }
            if dev > 3.0 * se {
                fails += 1;
            }
        }
    }
    c.check(
        fails == 0,
        format!("{fails} of {} coordinates beyond 3 SE", blocks * m),
    );
    c.note(format!("max |z| = {worst_z:.2}"));
}

/// SumLoss and PairwiseLoss regret traces coincide round by round.
fn criterion_6(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut differing = 0;
    for episode in 0..100u64 {
        let stream = random_stream(&mut rng, 5, 200, 1);
        let a = run_episode(
            Measure::SumLoss,
            &stream,
            &mut ChaCha8Rng::seed_from_u64(episode),
        )
        .unwrap();
        let b = run_episode(
            Measure::PairwiseLoss,
            &stream,
            &mut ChaCha8Rng::seed_from_u64(episode),
        )
        .unwrap();
        let same = a.len() == 200
            && a.rows()
                .iter()
                .zip(b.rows())
                .all(|(x, y)| x.t == y.t && x.regret == y.regret);
        if !same {
            differing += 1;
        }
    }
    c.check(
        differing == 0,
        format!("{differing} of 100 episodes differ"),
    );
}

/// Decay rates of the averaged time-normalized regret for DCG.
fn criterion_7(c: &mut Checks) {
    let start = Instant::now();
    let adversary =
        AdversaryConfig::new(AdversaryKind::NoisyFixed { noise_sd: 0.2 }, 10, 10_000, 7);
    let slope = |learner| {
        let cfg = ExperimentConfig {
            measure: Measure::Dcg,
            learner,
            adversary: adversary.clone(),
            runs: 10,
            seed: 7,
        };
        let out = run_experiment(&cfg).unwrap();
        fit_slope(&out.averaged, 1000, 10_000).unwrap().slope
    };
    let top1 = slope(LearnerKind::Rtop1f);
    let full = slope(LearnerKind::Ftpl);
    c.note(format!("rtop1f {top1:.3}, ftpl {full:.3}"));
    c.check(
        (-0.48..=-0.20).contains(&top1),
        format!("rtop1f slope {top1:.3} outside [-0.48, -0.20]"),
    );
    c.check(
        (-0.65..=-0.38).contains(&full),
        format!("ftpl slope {full:.3} outside [-0.65, -0.38]"),
    );
    c.check(
        full < top1,
        format!("ftpl slope {full:.3} not below rtop1f slope {top1:.3}"),
    );
    c.within(start.elapsed(), Duration::from_secs(120));
}

/// The sorting comparator agrees with exhaustive search.
fn criterion_8(c: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = [
        (Measure::SumLoss, 5, 1, true),
        (Measure::PairwiseLoss, 5, 1, true),
        (Measure::PrecAtK(2), 5, 1, true),
        (Measure::Dcg, 5, 1, false),
        (Measure::Dcg, 5, 3, false),
        (Measure::Ndcg, 4, 3, false),
        (Measure::Map, 5, 1, false),
        (Measure::Auc, 5, 1, false),
    ];
    for (measure, m, n, exact) in cases {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let t = rng.random_range(1..=25);
            let stream = random_stream(&mut rng, m, t, n);
            let (_, fast) = best_in_hindsight(measure, &stream).unwrap();
            let (_, slow) = brute_force_best(measure, &stream).unwrap();
            worst = worst.max((fast - slow).abs());
        }
        let ok = if exact { worst == 0.0 } else { worst <= 1e-12 };
        c.check(ok, format!("{measure} (n={n}): max gap {worst:e}"));
    }
    c.note("8 measure/level combinations x 200 streams");
}

/// Cumulative regret of the top-1 learner grows sublinearly.
fn criterion_9(c: &mut Checks) {
    let cases = [
        (Measure::SumLoss, 1),
        (Measure::Dcg, 1),
        (Measure::Dcg, 3),
        (Measure::PrecAtK(2), 1),
    ];
    let horizons = [1_000, 4_000, 16_000];
    let mut worst = 0.0f64;
    for (measure, n) in cases {
        for m in [3, 5] {
            let regrets: Vec<f64> = horizons
                .iter()
                .map(|&t| {
                    let kind = if n > 1 {
                        AdversaryKind::GradedNoisyFixed {
                            levels: n,
                            noise_sd: 0.2,
                        }
                    } else {
                        AdversaryKind::NoisyFixed { noise_sd: 0.2 }
                    };
                    let cfg = ExperimentConfig {
                        measure,
                        learner: LearnerKind::Rtop1f,
                        adversary: AdversaryConfig::new(kind, m, t, 9),
                        runs: 10,
                        seed: 9,
                    };
                    run_experiment(&cfg)
                        .unwrap()
                        .averaged
                        .final_regret()
                        .unwrap()
                })
                .collect();
            for w in regrets.windows(2) {
                let ratio = w[1] / w[0];
                worst = worst.max(ratio);
                c.check(
                    w[0] > 0.0 && ratio <= 3.2,
                    format!(
                        "{measure} n={n} m={m}: regret {:.1} -> {:.1} (ratio {ratio:.2})",
                        w[0], w[1]
                    ),
                );
            }
        }
    }
    c.note(format!("max ratio {worst:.2}"));
}

/// The CLI refuses normalized measures with exit code 3.
fn criterion_10(c: &mut Checks) {
    let dir = tempfile::tempdir().unwrap();
    for measure in ["ndcg", "map", "auc"] {
        let out = Command::new(env!("CARGO_BIN_EXE_toprank"))
            .args([
                "simulate",
                "--measure",
                measure,
                "--learner",
                "rtop1f",
                "--m",
                "4",
                "--T",
                "100",
            ])
            .args([
                "--runs",
                "1",
                "--seed",
                "0",
                "--adversary",
                "noisy-fixed",
                "--noise-sd",
                "0.2",
            ])
            .arg("--out")
            .arg(dir.path().join("trace.csv"))
            .output()
            .unwrap();
        let stderr = String::from_utf8_lossy(&out.stderr);
        c.check(
            out.status.code() == Some(3),
            format!("{measure}: exit {:?}", out.status.code()),
        );
        c.check(
            stderr.contains("sublinear") && stderr.contains("Θ(T)"),
            format!("{measure}: message `{}`", stderr.trim()),
        );
    }
}

fn main() -> ExitCode {
    type Criterion = (usize, &'static str, fn(&mut Checks));
    let criteria: [Criterion; 10] = [
        (1, "golden loss/feedback matrices", criterion_1),
        (2, "SumLoss global observability", criterion_2),
        (3, "SumLoss local observability fails", criterion_3),
        (
            4,
            "normalized measures fail global observability",
            criterion_4,
        ),
        (5, "unbiased block estimate", criterion_5),
        (6, "SumLoss/PairwiseLoss regret identity", criterion_6),
        (7, "regret decay rates", criterion_7),
        (8, "hindsight oracle equivalence", criterion_8),
        (9, "sublinear regret growth", criterion_9),
        (10, "refusal of normalized measures", criterion_10),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, run) in criteria {
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || *f == n.to_string())
        {
            continue;
        }
        let mut checks = Checks::default();
        let outcome = panic::catch_unwind(panic::AssertUnwindSafe(|| run(&mut checks)));
        if let Err(p) = outcome {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            checks.failures.push(format!("panicked: {msg}"));
        }
        let verdict = if checks.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut detail = checks.notes.join("; ");
        if !checks.failures.is_empty() {
            failed += 1;
            detail = format!("{} | {detail}", checks.failures.join("; "));
        }
        println!("criterion {n:>2} {verdict}: {name} [{detail}]");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
