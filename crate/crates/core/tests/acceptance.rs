//! Acceptance suite: one PASS/FAIL line per criterion, then a single assertion over all of them.
//!
//! The Monte Carlo sweeps behind criteria 1, 2, 8 and 9 are run once and shared. Expect
//! roughly ten minutes on one core.

use relaylab_core::analytic::{
    laplace_joint, AnalyticModel, InversionMethod, QrDistribution, QuadratureSpec, ShotNoiseTransform,
};
use relaylab_core::bandit::{kl_divergence_bernoulli, kl_ucb_index, ArmSchedule, Policy};
use relaylab_core::geometry::{sample_ppp, shot_noise, EmitterClass};
use relaylab_core::harness::experiments::{estimator as est, run_race, RegretTable, SweepTable};
use relaylab_core::harness::output::{regret_csv, sweep_csv};
use relaylab_core::harness::{run_fig2, run_fig3, run_fig4, ExperimentConfig, ExperimentId, Sweep, SweepVariable};
use relaylab_core::relay_sim::estimate_success_probs;
use relaylab_core::rng::label;
use relaylab_core::{SeedPath, SystemParams};
use rand::Rng;

struct Verdict {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn verdict(id: &'static str, name: &'static str, pass: bool, detail: String) -> Verdict {
    let v = Verdict { id, name, pass, detail };
    eprintln!("[{}] {}: {}", v.id, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    v
}

fn row(table: &SweepTable, value: f64, estimator: &str) -> (f64, f64) {
    let r = table
        .rows
        .iter()
        .find(|r| ((r.sweep_value - value) / value).abs() < 1e-9 && r.estimator == estimator)
        .unwrap_or_else(|| panic!("no {estimator} row at {value}"));
    (r.estimate, r.std_error)
}

fn tolerance(se: f64) -> f64 {
    0.02f64.max(3.0 * se)
}

struct Sweeps {
    fig2: SweepTable,
    fig3: SweepTable,
}

fn criterion_1(s: &Sweeps) -> Vec<Verdict> {
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut detail = Vec::new();
    let mut check = |label: String, analytic: f64, mc: f64, se: f64| {
        let diff = (analytic - mc).abs();
        pass &= diff <= tolerance(se);
        worst = worst.max(diff);
        detail.push(format!("{label}: {analytic:.4} vs {mc:.4}"));
    };
    for zeta in [1e-4, 1e-3] {
        let (a, _) = row(&s.fig2, zeta, est::OPTIMAL_ANALYTIC);
        let (m, se) = row(&s.fig2, zeta, est::OPTIMAL_MC);
        check(format!("zeta={zeta:e}"), a, m, se);
    }
    // 5e-3 is not a fig2 grid point
    let params = SystemParams {
        zeta: 5e-3,
        ..SystemParams::default()
    };
    let mc = estimate_success_probs(&params, 200_000, SeedPath::new(51).child(label::SLOTS)).unwrap();
    let a = AnalyticModel::new(params).unwrap().success_prob_optimal().unwrap();
    check("zeta=5e-3".into(), a, mc.optimal.mean(), mc.optimal.std_error());
    for e_c in [1e-3, 2e-3, 4e-3] {
        let (a, _) = row(&s.fig3, e_c, est::OPTIMAL_ANALYTIC);
        let (m, se) = row(&s.fig3, e_c, est::OPTIMAL_MC);
        check(format!("E_C={e_c:e}"), a, m, se);
    }
    let mut out = vec![verdict(
        "1",
        "analytic vs Monte Carlo",
        pass,
        format!("max |diff| {worst:.4}; {}", detail.join(", ")),
    )];

    let base = SystemParams::default();
    let wide = SystemParams { r_max: 1000.0, ..base };
    let p500 = estimate_success_probs(&base, 200_000, SeedPath::new(52).child(label::SLOTS)).unwrap();
    let p1000 = estimate_success_probs(&wide, 200_000, SeedPath::new(52).child(label::SLOTS)).unwrap();
    let diff = (p500.optimal.mean() - p1000.optimal.mean()).abs();
    let se = p500.optimal.std_error().hypot(p1000.optimal.std_error());
    out.push(verdict(
        "1b",
        "R_max doubling",
        diff <= tolerance(se),
        format!(
            "p_optimal {:.4} at 500 m, {:.4} at 1000 m; passive-only term {:.5} -> {:.5}",
            p500.optimal.mean(),
            p1000.optimal.mean(),
            p500.term_passive_only.mean(),
            p1000.term_passive_only.mean()
        ),
    ));
    out
}

fn criterion_2(s: &Sweeps) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (mc_name, an_name) in [
        (est::TERM_ACTIVE_MC, est::TERM_ACTIVE_ANALYTIC),
        (est::TERM_PASSIVE_RESCUE_MC, est::TERM_PASSIVE_RESCUE_ANALYTIC),
        (est::TERM_PASSIVE_ONLY_MC, est::TERM_PASSIVE_ONLY_ANALYTIC),
    ] {
        let (m, se) = row(&s.fig2, 1e-3, mc_name);
        let (a, _) = row(&s.fig2, 1e-3, an_name);
        pass &= (a - m).abs() <= tolerance(se);
        detail.push(format!("{an_name} {a:.5} vs {m:.5}"));
    }
    verdict("2", "term-level agreement", pass, detail.join(", "))
}

fn levy_pdf(q: f64, scale: f64) -> f64 {
    (scale / (2.0 * std::f64::consts::PI)).sqrt() * (-scale / (2.0 * q)).exp() / q.powf(1.5)
}

fn levy_cdf(q: f64, scale: f64) -> f64 {
    statrs::function::erf::erfc((scale / (2.0 * q)).sqrt())
}

fn criterion_3() -> Verdict {
    let p = SystemParams::default();
    let tf = ShotNoiseTransform::new(p.p_carrier, p.zeta_carrier, 4.0).unwrap();
    // exp(-c sqrt(s)) is the Lévy law with scale c^2 / 2
    let scale = tf.scale().powi(2) / 2.0;
    let dist = QrDistribution::new(tf, &QuadratureSpec::default()).unwrap();
    // 60 terms lose the far left edge, where the density is below 1e-15
    let gs = InversionMethod::GaverStehfest { terms: 100 };
    let talbot = InversionMethod::Talbot { nodes: 32 };
    let (mut worst_table, mut worst_methods) = (0.0f64, 0.0f64);
    for i in 0..=40 {
        let q = scale * 10f64.powf(-2.0 + 0.1 * i as f64);
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        worst_table = worst_table
            .max(rel(dist.pdf(q).unwrap(), levy_pdf(q, scale)))
            .max(rel(dist.cdf(q).unwrap(), levy_cdf(q, scale)));
        let (pt, pg) = (dist.pdf_with(q, talbot).unwrap(), dist.pdf_with(q, gs).unwrap());
        let (ct, cg) = (dist.cdf_with(q, talbot).unwrap(), dist.cdf_with(q, gs).unwrap());
        worst_methods = worst_methods.max(rel(pg, pt)).max(rel(cg, ct));
    }
    verdict(
        "3",
        "inverse Laplace vs Lévy",
        worst_table <= 1e-3 && worst_methods <= 1e-3,
        format!("max rel err vs closed form {worst_table:.2e}, Talbot vs Gaver-Stehfest {worst_methods:.2e}"),
    )
}

fn criterion_4() -> Verdict {
    let p = SystemParams::default();
    let region = p.region().unwrap();
    let tf = ShotNoiseTransform::new(p.p_interferer, p.zeta, p.alpha).unwrap();
    let s_values: [f64; 3] = [1e6, 1e7, 1e8];
    let draws = 100_000u64;
    let root = SeedPath::new(4);
    let mut single = [0.0f64; 3];
    let mut joint = [0.0f64; 3];
    for i in 0..draws {
        let mut rng = root.child(i).rng();
        let field = sample_ppp(p.zeta, region, EmitterClass::Interferer, &mut rng).unwrap();
        let at_d = field.with_fresh_marks(&mut rng);
        let i_r = shot_noise(&field, p.relay(), p.p_interferer, p.alpha).unwrap();
        let i_d = shot_noise(&at_d, p.destination(), p.p_interferer, p.alpha).unwrap();
        for (k, s) in s_values.iter().enumerate() {
            single[k] += (-s * i_r).exp();
            joint[k] += (-s * (i_r + i_d)).exp();
        }
    }
    let spec = QuadratureSpec::default();
    let (mut worst_single, mut worst_joint) = (0.0f64, 0.0f64);
    let mut detail = Vec::new();
    for (k, &s) in s_values.iter().enumerate() {
        let ls = tf.laplace(s).unwrap();
        let lj = laplace_joint(s, s, &tf, p.d_rd, &spec).unwrap();
        let (es, ej) = (single[k] / draws as f64, joint[k] / draws as f64);
        worst_single = worst_single.max(((es - ls) / ls).abs());
        worst_joint = worst_joint.max(((ej - lj) / lj).abs());
        detail.push(format!("s={s:e}: {ls:.4}/{es:.4}, {lj:.4}/{ej:.4}"));
    }
    verdict(
        "4",
        "Laplace functional vs field draws",
        worst_single <= 0.01 && worst_joint <= 0.02,
        format!(
            "single max rel {worst_single:.2e}, joint max rel {worst_joint:.2e} ({})",
            detail.join("; ")
        ),
    )
}

fn criterion_5() -> Verdict {
    let mut rng = SeedPath::new(5).rng();
    let (mut worst_residual, mut worst_scan) = (0.0f64, 0.0f64);
    let mut off = Vec::new();
    for _ in 0..1000 {
        let mean: f64 = rng.random_range(0.0..1.0);
        let n = rng.random_range(1..=500u32) as f64;
        let t = n + rng.random_range(0..20_000u32) as f64;
        let q = kl_ucb_index(mean, n, t);
        let budget = t.ln() / n;
        // d(mean, 1) is infinite for mean < 1, so the constraint always binds
        let residual = (kl_divergence_bernoulli(mean, q) - budget).abs();
        worst_residual = worst_residual.max(residual);
        if residual > 1e-8 {
            // one ulp of q moves d by about ulp / (1 - q) here
            off.push(format!("(mean {mean:.4}, n {n}, t {t}: 1-q {:.1e}, residual {residual:.1e})", 1.0 - q));
        }
        // largest point of the 1e-6 grid inside the confidence region
        let mut k = (mean * 1e6).ceil() as u64;
        while k < 1_000_000 && kl_divergence_bernoulli(mean, (k + 1) as f64 * 1e-6) <= budget {
            k += 1;
        }
        worst_scan = worst_scan.max((q - k as f64 * 1e-6).abs());
    }
    verdict(
        "5",
        "KL-UCB index solver",
        worst_residual <= 1e-8 && worst_scan <= 2e-6,
        format!(
            "max |d - log t/n| {worst_residual:.2e}, max |q - scan| {worst_scan:.2e}; {} of 1000 over 1e-8 {}",
            off.len(),
            off.join(" ")
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut config = ExperimentConfig::defaults(ExperimentId::Fig4);
    config.replications = 100;
    config.horizon = 10_000;
    let schedule = ArmSchedule::stationary(vec![0.4, 0.6]).unwrap();
    let t = run_race(&config, &schedule, &[Policy::KlUcb, Policy::Random]).unwrap();
    let kl = &t.curve("kl_ucb").unwrap().mean;
    let random = &t.curve("random").unwrap().mean;
    let (half, end) = (kl[4999], kl[9999]);
    let ratio = end / random[9999];
    let growth = (end - half) / half;
    verdict(
        "6",
        "stationary logarithmic regret",
        ratio < 0.25 && growth < 0.15,
        format!(
            "KL-UCB {end:.1} vs Random {:.1} (ratio {ratio:.3}); second-half growth {:.1}%",
            random[9999],
            100.0 * growth
        ),
    )
}

/// Ratio of the last-200-round to the first-200-round regret increment in each segment.
fn segment_ratios(table: &RegretTable, policy: &str) -> Vec<f64> {
    let r = &table.curve(policy).unwrap().mean;
    let at = |i: i64| if i < 0 { 0.0 } else { r[i as usize] };
    let bps = table.schedule.breakpoints();
    (0..bps.len())
        .map(|k| {
            let start = bps[k] as i64;
            let end = bps.get(k + 1).map_or(table.horizon, |b| *b) as i64;
            let first = at(start + 199) - at(start - 1);
            let last = at(end - 1) - at(end - 201);
            if first > 0.0 {
                last / first
            } else if last > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect()
}

fn criterion_7() -> Verdict {
    let mut best: Option<(f64, RegretTable)> = None;
    let mut per_gamma = Vec::new();
    for gamma in [0.8, 0.9, 0.95] {
        let mut config = ExperimentConfig::defaults(ExperimentId::Fig4);
        config.bandit.gamma = gamma;
        let t = run_fig4(&config).unwrap();
        let fin = *t.curve("discounted_kl_ucb").unwrap().mean.last().unwrap();
        per_gamma.push(format!("gamma={gamma}: {fin:.0}"));
        if best.as_ref().is_none_or(|(b, _)| fin < *b) {
            best = Some((fin, t));
        }
    }
    let (d, table) = best.unwrap();
    let fin = |p: &str| *table.curve(p).unwrap().mean.last().unwrap();
    let ordering = ["kl_ucb", "random", "etc"].iter().all(|p| d < fin(p));
    let ratios = segment_ratios(&table, "discounted_kl_ucb");
    let stable = ratios.iter().all(|r| *r < 0.25);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    verdict(
        "7",
        "nonstationary race",
        ordering && stable,
        format!(
            "D-KL-UCB {d:.0} ({}) vs KL-UCB {:.0}, Random {:.0}, ETC {:.0}; ordering {}; last/first-200 ratios [{}] {}",
            per_gamma.join(", "),
            fin("kl_ucb"),
            fin("random"),
            fin("etc"),
            if ordering { "holds" } else { "violated" },
            shown.join(" "),
            if stable { "all < 0.25" } else { "not all < 0.25" }
        ),
    )
}

fn criterion_8(s: &Sweeps) -> Verdict {
    let mut dominance = true;
    let mut crossovers = Vec::new();
    for table in [&s.fig2, &s.fig3] {
        let (mut active_wins, mut passive_wins) = (false, false);
        for v in table.sweep_values() {
            let (opt, _) = row(table, v, est::OPTIMAL_MC);
            let (a, se_a) = row(table, v, est::ACTIVE_MC);
            let (p, se_p) = row(table, v, est::PASSIVE_MC);
            dominance &= opt >= a - 3.0 * se_a && opt >= p - 3.0 * se_p;
            active_wins |= a > p;
            passive_wins |= p > a;
        }
        crossovers.push(active_wins && passive_wins);
    }
    verdict(
        "8",
        "union dominance and crossover",
        dominance && crossovers.iter().all(|c| *c),
        format!(
            "dominance {}; crossover on zeta grid {}, on E_C grid {}",
            dominance, crossovers[0], crossovers[1]
        ),
    )
}

fn criterion_9(s: &Sweeps) -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for v in s.fig2.sweep_values() {
        let (b, _) = row(&s.fig2, v, est::BANDIT);
        let (a, _) = row(&s.fig2, v, est::ACTIVE_MC);
        let (p, _) = row(&s.fig2, v, est::PASSIVE_MC);
        let gap = a.max(p) - b;
        pass &= gap <= 0.03;
        detail.push(format!("{v:.2e}: {gap:+.4}"));
    }
    verdict(
        "9",
        "bandit tracks best mode",
        pass,
        format!("best mode minus D-KL-UCB tail rate: {}", detail.join(", ")),
    )
}

fn criterion_10() -> Verdict {
    let mut sweep = ExperimentConfig::defaults(ExperimentId::Fig2);
    sweep.sweep = Some(Sweep {
        variable: SweepVariable::Zeta,
        grid: vec![5e-4, 5e-3],
    });
    sweep.n_slots = 3000;
    sweep.replications = 3;
    sweep.horizon = 1000;
    let mut race = ExperimentConfig::defaults(ExperimentId::Fig4);
    race.replications = 6;
    race.horizon = 2000;
    let sweep_bytes = |threads| {
        let mut c = sweep.clone();
        c.threads = threads;
        sweep_csv(&run_fig2(&c).unwrap()).unwrap()
    };
    let race_bytes = |threads| {
        let mut c = race.clone();
        c.threads = threads;
        regret_csv(&run_fig4(&c).unwrap()).unwrap()
    };
    let s = [sweep_bytes(Some(4)), sweep_bytes(Some(4)), sweep_bytes(Some(1))];
    let r = [race_bytes(Some(4)), race_bytes(Some(4)), race_bytes(Some(1))];
    let rerun = s[0] == s[1] && r[0] == r[1];
    let threads = s[0] == s[2] && r[0] == r[2];
    verdict(
        "10",
        "determinism",
        rerun && threads,
        format!("identical across reruns {rerun}, across 1 vs 4 threads {threads}"),
    )
}

#[test]
fn acceptance_criteria() {
    let mut verdicts = vec![criterion_3(), criterion_4(), criterion_5(), criterion_6(), criterion_7(), criterion_10()];
    let sweeps = Sweeps {
        fig2: run_fig2(&ExperimentConfig::defaults(ExperimentId::Fig2)).unwrap(),
        fig3: run_fig3(&ExperimentConfig::defaults(ExperimentId::Fig3)).unwrap(),
    };
    verdicts.extend(criterion_1(&sweeps));
    verdicts.push(criterion_2(&sweeps));
    verdicts.push(criterion_8(&sweeps));
    verdicts.push(criterion_9(&sweeps));
    verdicts.sort_by_key(|v| {
        let digits: String = v.id.chars().take_while(|c| c.is_ascii_digit()).collect();
        (digits.parse::<u32>().unwrap(), v.id.len())
    });

    println!();
    for v in &verdicts {
        println!(
            "criterion {:<3} {} {}: {}",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
    }
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
