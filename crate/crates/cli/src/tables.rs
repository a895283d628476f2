//! Reference numbers recomputed from scratch and compared with stored values.

use anyhow::Result;

use itsnet::gf2::{cross_independent, BitMatrix};
use itsnet::predistribution::{generate, NodeSet, SchemeSpec};
use itsnet::rates::{
    capacity, combinational_max_rates, gamma, rational, same_pairwise_hybrid, scheme_max_rates, to_f64,
    tradeoff_check, NetworkParams, Rational,
};
use itsnet::secure_check::{check_exact, check_feasibility, default_epsilon, r_secrecy_w, RateProfile, Status};
use itsnet::seed::Seed;

/// How a computed value is compared with its expectation.
enum Expect {
    Exact(String),
    /// Decimal rendering at the given number of places.
    Decimal(String, usize),
}

struct Row {
    label: &'static str,
    computed: String,
    expect: Expect,
}

impl Row {
    fn exact(label: &'static str, computed: impl ToString, expected: &str) -> Self {
        Row {
            label,
            computed: computed.to_string(),
            expect: Expect::Exact(expected.into()),
        }
    }

    fn decimal(label: &'static str, computed: &Rational, expected: &str, places: usize) -> Self {
        Row {
            label,
            computed: format!("{:.places$}", to_f64(computed)),
            expect: Expect::Decimal(expected.into(), places),
        }
    }

    fn passes(&self) -> bool {
        match &self.expect {
            Expect::Exact(e) | Expect::Decimal(e, _) => &self.computed == e,
        }
    }

    fn expected(&self) -> String {
        match &self.expect {
            Expect::Exact(e) => e.clone(),
            Expect::Decimal(e, places) => format!("{e} ({places} places)"),
        }
    }
}

fn params(n: u32, t: u32) -> NetworkParams {
    NetworkParams::new(n, t).expect("reference parameters are valid")
}

fn rows() -> itsnet::Result<Vec<Row>> {
    let mut rows = Vec::new();

    rows.push(Row::exact("capacity n=4 t=1: channel", capacity(params(4, 1)).channel, "1/3"));
    rows.push(Row::exact("capacity n=5 t=1: channel", capacity(params(5, 1)).channel, "1/3"));
    rows.push(Row::exact("capacity n=4 t=1: network", capacity(params(4, 1)).net, "2"));

    let pairwise = scheme_max_rates(&SchemeSpec::Pairwise, params(100, 1))?;
    rows.push(Row::decimal("pairwise n=100 t=1: network", &pairwise.net, "50.0", 1));
    rows.push(Row::decimal("pairwise n=100 t=1: channel", &pairwise.channel, "0.0101", 4));
    rows.push(Row::exact("pairwise n=100 t=1: channel (exact)", &pairwise.channel, "1/99"));
    let hybrid: SchemeSpec = "hybrid:lambda=1/2:pairwise|comb:a=25".parse()?;
    let hybrid = scheme_max_rates(&hybrid, params(100, 1))?;
    rows.push(Row::decimal("hybrid 1/2 pairwise + 1/2 a=25, n=100 t=1: network", &hybrid.net, "26.53", 2));
    rows.push(Row::decimal("hybrid 1/2 pairwise + 1/2 a=25, n=100 t=1: channel", &hybrid.channel, "0.0978", 4));

    let a2 = combinational_max_rates(params(10, 3), 2)?;
    rows.push(Row::exact("a=2, n=10 t=3: network", &a2.net, "5"));
    rows.push(Row::exact("a=2, n=10 t=3: channel", &a2.channel, "1/9"));
    let all_one = (2..=10).all(|a| gamma(params(10, 0), a).is_ok_and(|g| g == rational(1, 1)));
    rows.push(Row::exact("gamma(0, a) = 1 for n=10, a=2..10", all_one, "true"));

    let same = scheme_max_rates(&SchemeSpec::Same, params(6, 0))?;
    rows.push(Row::exact("same key n=6: tradeoff slack", tradeoff_check(params(6, 0), &same)?.slack, "0"));
    let pair = scheme_max_rates(&SchemeSpec::Pairwise, params(6, 0))?;
    rows.push(Row::exact("pairwise n=6: tradeoff slack", tradeoff_check(params(6, 0), &pair)?.slack, "0"));
    let family = same_pairwise_hybrid(6, &rational(1, 3))?;
    rows.push(Row::exact(
        "same/pairwise hybrid n=6 lambda=1/3: tradeoff slack",
        tradeoff_check(params(6, 0), &family)?.slack,
        "0",
    ));

    let comb3 = SchemeSpec::Combinational { a: 3 };
    let ks = generate(&comb3, 4, 3, Seed::from(0))?;
    rows.push(Row::exact("a=3, n=4, l=3: groups", ks.groups().len(), "4"));
    rows.push(Row::exact("a=3, n=4, l=3: common bits of (1,2)", ks.common_bits(1, 2)?.len(), "2"));
    let pw = generate(&SchemeSpec::Pairwise, 4, 3, Seed::from(0))?;
    rows.push(Row::exact("pairwise n=4, l=3: groups", pw.groups().len(), "6"));
    rows.push(Row::exact(
        "a=3, n=4: r_secrecy of (1,2),(1,3),(2,3) with node 4 hacked",
        ks.r_secrecy(&[(1, 2), (1, 3), (2, 3)], &NodeSet::new([4]))?,
        "1/3",
    ));
    rows.push(Row::exact("a=3, n=4, t=1: r_secrecy(3)", r_secrecy_w(&comb3, params(4, 1), 3)?, "1/3"));

    let eps = default_epsilon();
    let edge = RateProfile::uniform(4, 1, &rational(1, 9))?;
    let verdict = check_exact(&ks, &edge, 1)?;
    rows.push(Row::exact("a=3, n=4, t=1, uniform 1/9: status", format!("{:?}", verdict.status), "NotAchievable"));
    let witness = verdict
        .witness
        .map(|w| format!("hacked={} channels={:?} bound={}", w.hacked, w.channels, w.r_secrecy))
        .unwrap_or_default();
    rows.push(Row::exact(
        "a=3, n=4, t=1, uniform 1/9: witness",
        witness,
        "hacked={4} channels=[(1, 2), (1, 3), (2, 3)] bound=1/3",
    ));
    let inside = RateProfile::uniform(4, 1, &(rational(1, 9) - &eps))?;
    rows.push(Row::exact(
        "a=3, n=4, t=1, uniform 1/9 - 2^-20: status",
        format!("{:?}", check_exact(&ks, &inside, 1)?.status),
        "Achievable",
    ));

    let mut single = RateProfile::new(4, 0)?;
    single.set(1, 2, rational(2, 3))?;
    rows.push(Row::exact(
        "a=3, n=4, t=0, r12 = 2/3: status",
        format!("{:?}", check_exact(&ks, &single, 0)?.status),
        "NotAchievable",
    ));
    single.set(1, 2, rational(2, 3) - &eps)?;
    rows.push(Row::exact(
        "a=3, n=4, t=0, r12 = 2/3 - 2^-20: status",
        format!("{:?}", check_exact(&ks, &single, 0)?.status),
        "Achievable",
    ));
    let mut star = RateProfile::new(4, 0)?;
    for j in 2..=4 {
        star.set(1, j, rational(1, 3))?;
    }
    let star_verdict = check_exact(&ks, &star, 0)?;
    rows.push(Row::exact(
        "a=3, n=4, t=0, r1j = 1/3: witness channels",
        format!("{:?}", star_verdict.witness.map(|w| w.channels).unwrap_or_default()),
        "[(1, 2), (1, 3), (1, 4)]",
    ));

    let feasible = RateProfile::uniform(4, 1, &(rational(1, 9) / (rational(1, 1) + &eps)))?;
    let flow = check_feasibility(&ks, &feasible, 1, &eps)?;
    rows.push(Row::exact(
        "a=3, n=4, t=1: feasibility at 3r(1+eps) = 1/3",
        flow.status == Status::Achievable,
        "true",
    ));

    let m1 = BitMatrix::from_sparse_rows(3, &[vec![0, 1], vec![0, 1]])?;
    let m2 = BitMatrix::from_sparse_rows(3, &[vec![1, 2]])?;
    rows.push(Row::exact(
        "blocks {110,110} and {011}: cross-independent",
        cross_independent(&[m1, m2])?,
        "true",
    ));

    Ok(rows)
}

pub fn run() -> Result<u8> {
    let rows = rows()?;
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(0);
    let mut failures = 0;
    for row in &rows {
        let ok = row.passes();
        failures += usize::from(!ok);
        println!(
            "{}  {:<width$}  computed {}  expected {}",
            if ok { "PASS" } else { "FAIL" },
            row.label,
            row.computed,
            row.expected()
        );
    }
    println!("{} of {} reference values reproduced", rows.len() - failures, rows.len());
    Ok(if failures == 0 { 0 } else { 1 })
}
