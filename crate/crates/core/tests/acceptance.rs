//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

#![allow(clippy::excessive_precision)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noma_sched::action_space::{
    build_hypergraph, count_full_actions, enumerate_reduced_actions, greedy_matching, permutations, Hyperedge,
    Matching,
};
use noma_sched::channel::{noma_rates, Transmitter};
use noma_sched::env::Environment;
use noma_sched::harness::{run_campaign, run_cell, tail_mean, CampaignSpec, CellResult};
use noma_sched::ppo::gradcheck::max_relative_error;
use noma_sched::ppo::{actor_loss, critic_loss, gae, masked_softmax, Architecture, Batch, Mlp, PpoAgent};
use noma_sched::schedulers::SchedulerKind;
use noma_sched::Config;

struct Outcome {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn action_combinatorics() -> Outcome {
    let t = Instant::now();
    let full = count_full_actions(4, 2).unwrap();
    let h = build_hypergraph(&[1, 2], &[3, 4], 2, |_| true);
    let got = enumerate_reduced_actions(&h, 2);
    let e = |f, r, m| Hyperedge::new(Some(f), Some(r), m);
    let expected = [
        Matching { edges: vec![e(1, 3, 0), e(2, 4, 1)] },
        Matching { edges: vec![e(2, 4, 0), e(1, 3, 1)] },
        Matching { edges: vec![e(1, 4, 0), e(2, 3, 1)] },
        Matching { edges: vec![e(2, 3, 0), e(1, 4, 1)] },
    ];
    let same_set = got.len() == expected.len()
        && expected.iter().all(|x| got.iter().any(|g| g.same_edges(x)))
        && got.iter().all(|g| expected.iter().any(|x| x.same_edges(g)));
    let el = t.elapsed();
    verdict(
        full == 90 && same_set && within(el, 1.0),
        format!("count_full_actions(4,2)={full}, {} matchings, set equal {same_set}, {el:.2?} (< 1 s)", got.len()),
    )
}

fn reduced_soundness() -> Outcome {
    let t = Instant::now();
    let mut cases = 0;
    let mut closed_form_cases = 0;
    let mut bad = Vec::new();
    for m in 1..=3usize {
        for f in 1..=5usize {
            for r in 1..=5usize {
                cases += 1;
                let far: Vec<usize> = (0..f).collect();
                let near: Vec<usize> = (f..f + r).collect();
                let h = build_hypergraph(&far, &near, m, |_| true);
                let actions = enumerate_reduced_actions(&h, m);
                let oracle = common::brute_force_reduced_count(f, r, m);
                if actions.len() != oracle {
                    bad.push(format!("F={f} R={r} M={m}: {} vs brute force {oracle}", actions.len()));
                }
                if f >= m && r >= m {
                    closed_form_cases += 1;
                    let closed = permutations(f as u128, m as u128).unwrap() * permutations(r as u128, m as u128).unwrap();
                    if actions.len() as u128 != closed {
                        bad.push(format!("F={f} R={r} M={m}: {} vs P*P {closed}", actions.len()));
                    }
                }
                for a in &actions {
                    if !a.is_valid() || a.to_allocation(m).validate(f + r, m).is_err() {
                        bad.push(format!("F={f} R={r} M={m}: invalid allocation {a:?}"));
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    verdict(
        bad.is_empty() && within(el, 10.0),
        format!(
            "{cases} (F,R,M) cases, {closed_form_cases} against P(F,M)P(R,M), all against brute force, {} mismatches{}, {el:.2?} (< 10 s)",
            bad.len(),
            bad.first().map(|b| format!(" e.g. {b}")).unwrap_or_default()
        ),
    )
}

fn gae_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6ae);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let t = rng.random_range(1..=32);
        let gamma = rng.random_range(0.0..=1.0);
        let lambda = rng.random_range(0.0..=1.0);
        let rewards: Vec<f64> = (0..t).map(|_| rng.random_range(-2.0..2.0)).collect();
        let values: Vec<f64> = (0..=t).map(|_| rng.random_range(-5.0..5.0)).collect();
        let (adv, _) = gae(&rewards, &values, gamma, lambda).unwrap();
        let oracle = common::gae_double_sum(&rewards, &values, gamma, lambda);
        for (a, o) in adv.iter().zip(&oracle) {
            worst = worst.max((a - o).abs());
        }
    }
    verdict(worst <= 1e-12, format!("1000 instances, max abs error {worst:.2e} (<= 1e-12)"))
}

fn gradient_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9ad);
    let mut worst: f64 = 0.0;
    let mut per_arch = [0.0f64; 2];
    for case in 0..20 {
        let d2rl = case % 2 == 1;
        let width = rng.random_range(3..=8);
        let arch = if d2rl {
            Architecture::D2rl { width, depth: 4 }
        } else {
            Architecture::SingleLayer { width }
        };
        let inputs = rng.random_range(2..=6);
        let outputs = rng.random_range(1..=5);
        let rows = rng.random_range(1..=6);
        let net = Mlp::new(arch, inputs, outputs, 1.0, &mut rng);
        let x = Array2::from_shape_simple_fn((rows, inputs), || rng.random_range(-1.5..1.5));
        let err = if case % 4 < 2 {
            // squared error to random targets
            let y = Array2::from_shape_simple_fn((rows, outputs), || rng.random_range(-1.0..1.0));
            let loss = |n: &Mlp| 0.5 * (n.forward(x.view()) - &y).mapv(|v| v * v).sum();
            let (out, cache) = net.forward_cached(x.view());
            let g = net.backward(&cache, &(out - &y));
            max_relative_error(&net, &g, loss, usize::MAX, 1e-6, &mut rng)
        } else if outputs == 1 {
            let ret: Vec<f64> = (0..rows).map(|_| rng.random_range(-3.0..3.0)).collect();
            let (_, g) = critic_loss(&net, &x, &ret).unwrap();
            max_relative_error(&net, &g, |n| critic_loss(n, &x, &ret).unwrap().0, usize::MAX, 1e-6, &mut rng)
        } else {
            let masks: Vec<Vec<bool>> = (0..rows)
                .map(|_| {
                    let mut m: Vec<bool> = (0..outputs).map(|_| rng.random_bool(0.7)).collect();
                    m[rng.random_range(0..outputs)] = true;
                    m
                })
                .collect();
            let logits = net.forward(x.view());
            let mut actions = Vec::new();
            let mut old = Vec::new();
            for (i, row) in logits.outer_iter().enumerate() {
                let d = masked_softmax(&row.to_vec(), &masks[i]).unwrap();
                let a = d.sample(&mut rng);
                actions.push(a);
                old.push(d.log_prob(a) + rng.random_range(-0.05..0.05));
            }
            let batch = Batch {
                obs: x.clone(),
                actions,
                masks,
                old_log_probs: old,
                advantages: (0..rows).map(|_| rng.random_range(-2.0..2.0)).collect(),
                returns: vec![0.0; rows],
            };
            let l = actor_loss(&net, &batch, 0.2, 0.01).unwrap();
            max_relative_error(
                &net,
                &l.grads,
                |n| actor_loss(n, &batch, 0.2, 0.01).unwrap().loss,
                usize::MAX,
                1e-6,
                &mut rng,
            )
        };
        per_arch[usize::from(d2rl)] = per_arch[usize::from(d2rl)].max(err);
        worst = worst.max(err);
    }
    verdict(
        worst <= 1e-4,
        format!(
            "20 cases, max relative error single-layer {:.2e}, D2RL {:.2e} (<= 1e-4)",
            per_arch[0], per_arch[1]
        ),
    )
}

fn ppo_identity() -> Outcome {
    let mut cfg = common::desk_config();
    cfg.ppo.actor_width = 64;
    cfg.ppo.critic_width = 64;
    let mut agent = PpoAgent::new(&cfg, true, 11).unwrap();
    agent.explore = true;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut decisions = Vec::new();
    for episode in 0..4 {
        let mut env = Environment::init_episode(&cfg.scenario(), 100 + episode).unwrap();
        while !env.is_done() {
            let d = agent.act(&env, &mut rng).unwrap();
            let alloc = noma_sched::action_space::ActionCodec::decode(agent.codec(), d.action, &env);
            env.step(&alloc).unwrap();
            decisions.push(d);
        }
    }
    let n = decisions.len();
    let dim = decisions[0].obs.len();
    let obs = Array2::from_shape_fn((n, dim), |(i, j)| decisions[i].obs[j]);
    let advantages: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let batch = Batch {
        obs,
        actions: decisions.iter().map(|d| d.action).collect(),
        masks: decisions.iter().map(|d| d.mask.clone()).collect(),
        old_log_probs: decisions.iter().map(|d| d.log_prob).collect(),
        advantages: advantages.clone(),
        returns: vec![0.0; n],
    };
    let logits = agent.actor().forward(batch.obs.view());
    let mut worst_ratio: f64 = 0.0;
    for (i, row) in logits.outer_iter().enumerate() {
        let d = masked_softmax(&row.to_vec(), &batch.masks[i]).unwrap();
        let ratio = (d.log_prob(batch.actions[i]) - batch.old_log_probs[i]).exp();
        worst_ratio = worst_ratio.max((ratio - 1.0).abs());
    }
    let l = actor_loss(agent.actor(), &batch, 0.2, 0.0).unwrap();
    let mean_adv = advantages.iter().sum::<f64>() / n as f64;
    let gap = (-l.loss - mean_adv).abs();
    verdict(
        worst_ratio <= 1e-9 && gap <= 1e-9,
        format!("{n} steps, max |ratio - 1| {worst_ratio:.2e}, |surrogate - mean advantage| {gap:.2e} (<= 1e-9)"),
    )
}

fn noma_rate_cases() -> Outcome {
    let w = 1e7;
    let noise = 10f64.powf(-13.4);
    let p = 0.08;
    let tx = |ue, gain_sq| Transmitter { ue, gain_sq, power_w: p };
    let mut worst: f64 = 0.0;
    // single occupant: Shannon formula, compared exactly
    let mut exact = true;
    for g in [1e-9, 3.2e-10, 4.7e-12] {
        let r = noma_rates(&[tx(0, g)], noise, w).unwrap()[0];
        exact &= r == w * (1.0 + g * p / noise).log2();
    }
    // (strong gain, weak gain, strong rate, weak rate), evaluated at 50 digits
    let cases = [
        (1e-9, 1e-11, 6.58885793456956670e7, 4.39883543687323332e7),
        (3.2e-10, 2.5e-10, 1.18742392647584770e7, 8.97549630957340896e7),
        (4.7e-12, 6.1e-13, 2.39046933108316362e7, 1.15432433967601825e7),
        (1e-10, 1e-10, 9.96423675660813041e6, 7.65786086897535324e7),
    ];
    for (hs, hw, rs, rw) in cases {
        // weak UE listed first, with the higher id, so the tie goes to UE 3
        let got = noma_rates(&[tx(5, hw), tx(3, hs)], noise, w).unwrap();
        worst = worst.max(((got[1] - rs) / rs).abs()).max(((got[0] - rw) / rw).abs());
    }
    verdict(
        exact && worst <= 1e-12,
        format!("single-occupant exact {exact}, two-UE max relative error {worst:.2e} (<= 1e-12)"),
    )
}

fn zero_collision() -> Outcome {
    let t = Instant::now();
    let cfg = Config::default();
    let episodes = 10_000 / cfg.system.episode_len_slots as usize;
    let mut worst: f64 = 0.0;
    let mut slots = 0;
    for kind in [
        SchedulerKind::ContentionFree,
        SchedulerKind::SemiStatic,
        SchedulerKind::RoundRobin,
        SchedulerKind::HeuristicGreedy,
    ] {
        for seed in 1..=3 {
            let cell = run_cell(&cfg, kind, seed, episodes).unwrap();
            slots += cell.logs.iter().map(|l| l.slots as usize).sum::<usize>();
            worst = worst.max(cell.rows.iter().map(|r| r.collision_rate).fold(0.0, f64::max));
        }
    }
    let contention = SchedulerKind::ContentionBased { transmit_prob: 0.5 };
    let rates: Vec<f64> = (1..=3)
        .flat_map(|seed| run_cell(&cfg, contention, seed, episodes).unwrap().rows)
        .map(|r| r.collision_rate)
        .collect();
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let sd = (rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    // one-sided 99% lower confidence bound on the mean collision rate
    let lower = mean - 2.326 * sd / n.sqrt();
    let el = t.elapsed();
    verdict(
        worst == 0.0 && lower > 0.0 && within(el, 60.0),
        format!(
            "centralized max collision rate {worst} over {slots} slots; contention-based mean {mean:.4}, 99% lower bound {lower:.4}; {el:.1?} (< 1 min)"
        ),
    )
}

fn greedy_half_of_optimum() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6ee);
    let mut invalid = 0;
    let mut below = 0;
    let mut worst_ratio: f64 = 1.0;
    for _ in 0..500 {
        let h = common::random_hypergraph(&mut rng, 12);
        let m = greedy_matching(&h, &mut rng);
        let valid = m
            .edges
            .iter()
            .enumerate()
            .all(|(i, a)| m.edges[i + 1..].iter().all(|b| !common::shares_vertex(a, b)))
            && m.edges.iter().all(|e| h.edges.iter().any(|x| x.same_vertices(e)));
        if !valid {
            invalid += 1;
        }
        let opt = common::brute_force_max_matching(&h);
        if opt > 0.0 {
            let ratio = m.weight() / opt;
            worst_ratio = worst_ratio.min(ratio);
            if ratio < 0.5 {
                below += 1;
            }
        }
    }
    let el = t.elapsed();
    verdict(
        invalid == 0 && below == 0 && within(el, 30.0),
        format!(
            "500 hypergraphs: {invalid} invalid, {below} below 50% of optimum, worst ratio {worst_ratio:.3}; {el:.1?} (< 30 s)"
        ),
    )
}

fn learning_orderings(cells: &[CellResult], elapsed: Duration) -> Outcome {
    let by = |name: &str| -> Vec<&CellResult> { cells.iter().filter(|c| c.scheme.name() == name).collect() };
    let ppo = by("ppo");
    let mut a_ok = true;
    let mut a_detail = Vec::new();
    for p in &ppo {
        let mine = tail_mean(&p.rows, 0.1).success_norm;
        let mut line = format!("seed {} ppo {mine:.3}", p.seed);
        for base in ["round-robin", "semi-static", "contention-based"] {
            let other = by(base).into_iter().find(|c| c.seed == p.seed).expect("baseline cell");
            let theirs = tail_mean(&other.rows, 0.1).success_norm;
            a_ok &= mine > theirs;
            line.push_str(&format!(" {base} {theirs:.3}"));
        }
        a_detail.push(line);
    }

    // seed-averaged evaluation curves
    let curve = |name: &str| -> (Vec<usize>, Vec<f64>) {
        let cs = by(name);
        let len = cs.iter().map(|c| c.rows.len()).min().unwrap_or(0);
        let episodes = cs[0].rows[..len].iter().map(|r| r.episode).collect();
        let mean = (0..len)
            .map(|i| cs.iter().map(|c| c.rows[i].success_norm).sum::<f64>() / cs.len() as f64)
            .collect();
        (episodes, mean)
    };
    let reach = |(episodes, mean): &(Vec<usize>, Vec<f64>)| {
        let k = (mean.len() as f64 * 0.1).ceil().max(1.0) as usize;
        let fin = mean[mean.len() - k..].iter().sum::<f64>() / k as f64;
        let idx = mean.iter().position(|&v| v >= 0.9 * fin).expect("the final window itself qualifies");
        (episodes[idx], fin)
    };
    let (reduced_at, reduced_final) = reach(&curve("ppo"));
    let (full_at, full_final) = reach(&curve("ppo-full"));
    let b_ok = reduced_at < full_at;
    verdict(
        a_ok && b_ok && within(elapsed, 1800.0),
        format!(
            "(a) {} [{}]; (b) reduced reaches 90% of {reduced_final:.3} at episode {reduced_at}, unreduced reaches 90% of {full_final:.3} at episode {full_at} [{}]; {elapsed:.0?} (<= 30 min)",
            if a_ok { "ok" } else { "violated" },
            a_detail.join("; "),
            if b_ok { "ok" } else { "violated" },
        ),
    )
}

fn conservation(groups: &[&[CellResult]]) -> Outcome {
    let mut episodes = 0;
    let mut broken = 0;
    for cells in groups {
        for c in cells.iter() {
            for l in &c.logs {
                episodes += 1;
                if l.successes + l.failed() + l.residual != l.arrivals {
                    broken += 1;
                }
            }
        }
    }
    verdict(
        broken == 0 && episodes > 0,
        format!("{episodes} episodes across every scheme, {broken} with successes + failures + residual != arrivals"),
    )
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        println!("{} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
        results.push((name, out));
    };

    run("action combinatorics", &mut action_combinatorics);
    run("reduced-space soundness", &mut reduced_soundness);
    run("GAE oracle", &mut gae_oracle);
    run("gradient correctness", &mut gradient_correctness);
    run("PPO identity", &mut ppo_identity);
    run("NOMA rates", &mut noma_rate_cases);
    run("zero collisions", &mut zero_collision);
    run("greedy matching", &mut greedy_half_of_optimum);

    let desk = Config::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/desk.toml")).expect("desk config");
    let t = Instant::now();
    let learning_cells = CampaignSpec::from_config(&desk, None)
        .and_then(|mut spec| {
            spec.schemes = ["ppo", "ppo-full", "round-robin", "semi-static", "contention-based"]
                .iter()
                .map(|n| SchedulerKind::from_name(n, &desk))
                .collect::<noma_sched::Result<_>>()?;
            run_campaign(&desk, &spec, None)
        });
    let learning_time = t.elapsed();
    run("learning orderings", &mut || match &learning_cells {
        Ok(cells) => learning_orderings(cells, learning_time),
        Err(e) => verdict(false, format!("campaign failed: {e}")),
    });

    run("task conservation", &mut || {
        let mut cfg = desk.clone();
        cfg.campaign.seeds = 2;
        let spec = CampaignSpec::from_config(&cfg, Some(40)).unwrap();
        let all = run_campaign(&cfg, &spec, None).unwrap();
        let learning: &[CellResult] = learning_cells.as_deref().unwrap_or(&[]);
        conservation(&[&all, learning])
    });

    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    println!(
        "\n{} of {} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failed: {}", failed.join(", "))
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
