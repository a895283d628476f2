use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use itsnet::adversary::{
    build_security_matrix, cross_independence_experiment, lemma_rank_experiment, lemma_sweep, secrecy_experiment,
    simulate_transcript, CrossConfig, LemmaConfig, Sampler,
};
use itsnet::amplify::{decrypt, encrypt, ChannelCipherState, CipherText};
use itsnet::gf2::BitString;
use itsnet::multipath::{plan, Topology};
use itsnet::predistribution::format::{KEYSTORE_MAGIC, NODE_VIEW_MAGIC};
use itsnet::predistribution::{generate_with, GenerateOptions, KeyStore, NodeId, NodeSet, NodeView, SchemeSpec};
use itsnet::rates::{
    capacity, combinational_max_rates, format_rational, gamma, optimal_group_size, parse_rational, scheme_max_rates,
    tradeoff_check, NetworkParams, Rational,
};
use itsnet::secure_check::{
    check_exact, check_feasibility, check_relaxed, default_epsilon, RateProfile, SecurityVerdict, Status,
};
use itsnet::seed::{Seed, RNG_ALGORITHM};

use crate::{CheckMethod, Cli, Command, ExperimentKind, Format, SamplerKind};

pub fn run(cli: &Cli) -> Result<u8> {
    let seed = cli.seed;
    match &cli.command {
        Command::Capacity { n, t, format } => cmd_capacity(*n, *t, *format),
        Command::Rates {
            scheme,
            n,
            t,
            sweep,
            format,
        } => cmd_rates(scheme, *n, *t, *sweep, *format),
        Command::Keygen {
            scheme,
            n,
            l,
            out,
            node,
            strict,
        } => cmd_keygen(scheme, *n, *l, out, *node, *strict, seed),
        Command::Check {
            store,
            spec,
            n,
            l,
            t,
            profile,
            method,
            epsilon,
        } => {
            let source = StoreSource::new(store.as_deref(), spec.as_deref(), *n, *l)?;
            cmd_check(&source, *t, profile, *method, epsilon.as_deref(), seed)
        }
        Command::Simulate {
            store,
            spec,
            n,
            l,
            t,
            profile,
            d,
        } => {
            let source = StoreSource::new(store.as_deref(), spec.as_deref(), *n, *l)?;
            cmd_simulate(&source, *t, profile, *d, seed)
        }
        Command::Experiment {
            kind,
            trials,
            r,
            ratio,
            sampler,
            c,
            d,
            scheme,
            n,
            t,
            l,
            profile,
            hacked,
            out,
        } => {
            let records = match kind {
                ExperimentKind::Lemma => {
                    let sampler = match sampler {
                        SamplerKind::Bernoulli => Sampler::Bernoulli {
                            c: *c.first().context("--c needs a value")?,
                        },
                        SamplerKind::FixedWeight => Sampler::FixedWeight { d: *d },
                    };
                    ratio
                        .iter()
                        .map(|q| {
                            lemma_rank_experiment(&LemmaConfig {
                                r: *r,
                                k: (q * *r as f64).round() as usize,
                                sampler,
                                trials: *trials,
                                seed,
                            })
                        })
                        .collect::<itsnet::Result<Vec<_>>>()?
                }
                ExperimentKind::LemmaSweep => lemma_sweep(*r, ratio, c, *trials, seed)?,
                ExperimentKind::Cross => {
                    let spec: SchemeSpec = scheme.parse()?;
                    let profile = load_profile(profile, *n, *t)?;
                    l.iter()
                        .map(|&l| {
                            cross_independence_experiment(&CrossConfig {
                                spec: spec.clone(),
                                n: *n,
                                l,
                                hacked: NodeSet::new(hacked.iter().copied()),
                                profile: profile.clone(),
                                d: *d,
                                trials: *trials,
                                seed,
                            })
                        })
                        .collect::<itsnet::Result<Vec<_>>>()?
                }
                ExperimentKind::Secrecy => {
                    let spec: SchemeSpec = scheme.parse()?;
                    let profile = load_profile(profile, *n, *t)?;
                    l.iter()
                        .map(|&l| secrecy_experiment(&spec, *n, l, &profile, *d, *trials, seed))
                        .collect::<itsnet::Result<Vec<_>>>()?
                }
            };
            write_csv(&records, out.as_deref())?;
            Ok(0)
        }
        Command::Encrypt {
            keystore,
            node,
            peer,
            input,
            out,
            state,
            d,
        } => cmd_encrypt(keystore, *node, *peer, input, out, state, *d, seed),
        Command::Decrypt {
            keystore,
            node,
            input,
            out,
            state,
            d,
        } => cmd_decrypt(keystore, *node, input, out, state, *d),
        Command::Multipath {
            topology,
            s,
            dst,
            t,
            m,
            blocked,
        } => cmd_multipath(topology, *s, *dst, *t, *m, blocked, seed),
        Command::PaperTables => crate::tables::run(),
    }
}

fn rat(r: &Rational) -> String {
    format_rational(r)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn seed_json(seed: Seed) -> serde_json::Value {
    json!({ "seed": seed.to_hex(), "rng": RNG_ALGORITHM })
}

fn cmd_capacity(n: u32, t: u32, format: Format) -> Result<u8> {
    let params = NetworkParams::new(n, t)?;
    let cap = capacity(params);
    let a = optimal_group_size(params);
    match format {
        Format::Text => {
            println!("n = {n}, t = {t}");
            println!("optimal group size a = {a}");
            println!("network capacity = {}", rat(&cap.net));
            println!("channel capacity = {}", rat(&cap.channel));
        }
        Format::Json => print_json(&json!({
            "n": n,
            "t": t,
            "a": a,
            "net": cap.net.to_string(),
            "channel": cap.channel.to_string(),
        }))?,
    }
    Ok(0)
}

fn cmd_rates(scheme: &str, n: u32, t: u32, sweep: bool, format: Format) -> Result<u8> {
    let spec: SchemeSpec = scheme.parse()?;
    let params = NetworkParams::new(n, t)?;
    let rates = scheme_max_rates(&spec, params)?;
    let tradeoff = if t == 0 {
        Some(tradeoff_check(params, &rates)?)
    } else {
        None
    };
    let sweep_rows = if sweep {
        (2..=n)
            .map(|a| Ok((a, gamma(params, a)?, combinational_max_rates(params, a)?)))
            .collect::<itsnet::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    match format {
        Format::Text => {
            println!("scheme = {spec}, n = {n}, t = {t}");
            println!("max network rate = {}", rat(&rates.net));
            println!("max channel rate = {}", rat(&rates.channel));
            if let Some(tr) = &tradeoff {
                println!(
                    "tradeoff (t = 0): {} with slack {}",
                    if tr.holds { "holds" } else { "VIOLATED" },
                    rat(&tr.slack)
                );
            }
            if sweep {
                println!();
                println!("{:>4}  {:<28}  {:<28}  {:<28}", "a", "gamma", "net", "channel");
                for (a, g, r) in &sweep_rows {
                    println!("{a:>4}  {:<28}  {:<28}  {:<28}", rat(g), rat(&r.net), rat(&r.channel));
                }
            }
        }
        Format::Json => {
            let rows: Vec<_> = sweep_rows
                .iter()
                .map(|(a, g, r)| json!({"a": a, "gamma": g.to_string(), "net": r.net.to_string(), "channel": r.channel.to_string()}))
                .collect();
            print_json(&json!({
                "scheme": spec.to_string(),
                "n": n,
                "t": t,
                "net": rates.net.to_string(),
                "channel": rates.channel.to_string(),
                "tradeoff": tradeoff.map(|tr| json!({"holds": tr.holds, "slack": tr.slack.to_string()})),
                "sweep": rows,
            }))?
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_keygen(scheme: &str, n: u32, l: u64, out: &Path, node: Option<u32>, strict: bool, seed: Seed) -> Result<u8> {
    let spec: SchemeSpec = scheme.parse()?;
    let ks = generate_with(&spec, n, l, seed, GenerateOptions { strict })?;
    match node {
        Some(i) => ks.node_view(i)?.save(out)?,
        None => ks.save(out)?,
    }
    print_json(&json!({
        "config": {
            "command": "keygen",
            "scheme": spec.to_string(),
            "n": n,
            "l": l,
            "strict": strict,
            "node": node,
            "seed": seed_json(seed),
        },
        "pool_bits": ks.u(),
        "groups": ks.groups().len(),
        "out": out.display().to_string(),
    }))?;
    Ok(0)
}

/// Where `check` and `simulate` get their keystore from.
enum StoreSource<'a> {
    File(&'a Path),
    Spec { spec: SchemeSpec, n: u32, l: Option<u64> },
}

impl<'a> StoreSource<'a> {
    fn new(store: Option<&'a Path>, spec: Option<&str>, n: Option<u32>, l: Option<u64>) -> Result<Self> {
        match (store, spec) {
            (Some(path), None) => Ok(StoreSource::File(path)),
            (None, Some(spec)) => Ok(StoreSource::Spec {
                spec: spec.parse()?,
                n: n.context("--spec needs --n")?,
                l,
            }),
            _ => bail!(itsnet::Error::InvalidArgument("give exactly one of --store and --spec".into())),
        }
    }

    fn load(&self, seed: Seed) -> Result<KeyStore> {
        match self {
            StoreSource::File(path) => {
                KeyStore::load(path).with_context(|| format!("loading keystore {}", path.display()))
            }
            StoreSource::Spec { spec, n, l } => {
                let l = match l {
                    Some(l) => *l,
                    None => spec.exact_budget_unit(*n).ok_or_else(|| {
                        itsnet::Error::InvalidArgument(format!("{spec} has no exact budget unit; pass --l"))
                    })?,
                };
                Ok(generate_with(spec, *n, l, seed, GenerateOptions::default())?)
            }
        }
    }

    fn describe(&self) -> serde_json::Value {
        match self {
            StoreSource::File(path) => json!({ "store": path.display().to_string() }),
            StoreSource::Spec { spec, n, l } => json!({ "spec": spec.to_string(), "n": n, "l": l }),
        }
    }
}

/// `uniform:R` or a JSON profile file. The hacked bound always comes from `--t`.
fn load_profile(text: &str, n: u32, t: u32) -> Result<RateProfile> {
    if let Some(r) = text.strip_prefix("uniform:") {
        return Ok(RateProfile::uniform(n, t, &parse_rational(r)?)?);
    }
    let body = fs::read_to_string(text).with_context(|| format!("reading profile {text}"))?;
    let mut profile = RateProfile::from_json(&body)?;
    if profile.n != n {
        bail!(itsnet::Error::InvalidArgument(format!(
            "profile is for n = {} but the keystore has n = {n}",
            profile.n
        )));
    }
    NetworkParams::new(n, t)?;
    profile.t = t;
    Ok(profile)
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Achievable => 0,
        Status::NotAchievable => 1,
        Status::Undecided => 2,
    }
}

fn cmd_check(
    source: &StoreSource,
    t: u32,
    profile: &str,
    method: CheckMethod,
    epsilon: Option<&str>,
    seed: Seed,
) -> Result<u8> {
    let ks = source.load(seed)?;
    let rates = load_profile(profile, ks.n(), t)?;
    let method = match method {
        CheckMethod::Auto if ks.n() <= 7 => CheckMethod::Exact,
        CheckMethod::Auto => CheckMethod::Relaxed,
        other => other,
    };
    let epsilon = match epsilon {
        Some(e) => parse_rational(e)?,
        None => default_epsilon(),
    };
    let verdict: SecurityVerdict = match method {
        CheckMethod::Exact | CheckMethod::Auto => check_exact(&ks, &rates, t)?,
        CheckMethod::Relaxed => check_relaxed(ks.scheme(), NetworkParams::new(ks.n(), t)?, &rates)?,
        CheckMethod::Feasibility => check_feasibility(&ks, &rates, t, &epsilon)?,
    };
    print_json(&json!({
        "config": {
            "command": "check",
            "source": source.describe(),
            "scheme": ks.scheme().to_string(),
            "n": ks.n(),
            "l": ks.l(),
            "t": t,
            "profile": profile,
            "epsilon": (method == CheckMethod::Feasibility).then(|| epsilon.to_string()),
            "seed": seed_json(seed),
        },
        "verdict": verdict,
    }))?;
    Ok(status_code(verdict.status))
}

fn cmd_simulate(source: &StoreSource, t: u32, profile: &str, d: usize, seed: Seed) -> Result<u8> {
    use itertools::Itertools;

    let ks = source.load(seed)?;
    let rates = load_profile(profile, ks.n(), t)?;
    let transcript = simulate_transcript(&ks, &rates, d, seed.derive(1))?;
    let mut summaries = Vec::new();
    for k in 0..=t as usize {
        for hacked in (1..=ks.n()).combinations(k) {
            let hacked = NodeSet::from_sorted(hacked);
            let witness = build_security_matrix(&ks, &transcript.restricted_to(&hacked))?;
            summaries.push(witness.summary(&hacked));
        }
    }
    let certified = summaries.iter().all(|s| s.full_rank);
    print_json(&json!({
        "config": {
            "command": "simulate",
            "source": source.describe(),
            "scheme": ks.scheme().to_string(),
            "n": ks.n(),
            "l": ks.l(),
            "t": t,
            "d": d,
            "profile": profile,
            "seed": seed_json(seed),
        },
        "messages": transcript.messages.len(),
        "key_bits": transcript.key_bits(),
        "certified": certified,
        "witnesses": summaries,
    }))?;
    Ok(if certified { 0 } else { 1 })
}

fn write_csv<T: Serialize>(records: &[T], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// A node view, read directly or cut from a full keystore with `--node`.
fn load_material(path: &Path, node: Option<u32>) -> Result<NodeView> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    match bytes.get(..4) {
        Some(m) if m == NODE_VIEW_MAGIC => {
            let view = NodeView::from_bytes(&bytes)?;
            if let Some(i) = node {
                if i != view.node() {
                    bail!(itsnet::Error::InvalidArgument(format!(
                        "--node {i} given but the file holds node {}",
                        view.node()
                    )));
                }
            }
            Ok(view)
        }
        Some(m) if m == KEYSTORE_MAGIC => {
            let i = node.ok_or_else(|| itsnet::Error::InvalidArgument("a full keystore needs --node".into()))?;
            Ok(KeyStore::from_bytes(&bytes)?.node_view(i)?)
        }
        _ => bail!(itsnet::Error::Format(format!("{} is not a keystore or node view", path.display()))),
    }
}

fn load_state(path: &Path, i: NodeId, j: NodeId, d: usize) -> Result<ChannelCipherState> {
    let state = if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str::<ChannelCipherState>(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        ChannelCipherState::with_weight(i, j, d)?
    };
    if state.pair() != itsnet::amplify::channel(i, j)? {
        bail!(itsnet::Error::InvalidArgument(format!(
            "state file is for channel {:?}, not ({i}, {j})",
            state.pair()
        )));
    }
    Ok(state)
}

fn save_state(path: &Path, state: &ChannelCipherState) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(state)?).with_context(|| format!("writing {}", path.display()))
}

/// Sampling seed of message `counter` on channel `(i, j)`.
fn sampling_seed(seed: Seed, i: NodeId, j: NodeId, counter: u64) -> Seed {
    seed.derive((u64::from(i) << 32) | u64::from(j)).derive(counter)
}

#[allow(clippy::too_many_arguments)]
fn cmd_encrypt(
    keystore: &Path,
    node: Option<u32>,
    peer: u32,
    input: &Path,
    out: &Path,
    state_path: &Path,
    d: usize,
    seed: Seed,
) -> Result<u8> {
    let view = load_material(keystore, node)?;
    let me = view.node();
    let mut state = load_state(state_path, me, peer, d)?;
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let plaintext = BitString::from_bytes(&bytes, bytes.len() * 8)?;
    let (i, j) = state.pair();
    let message_seed = sampling_seed(seed, i, j, state.next_counter);
    let ct = encrypt(&view, &mut state, &plaintext, message_seed)?;
    fs::write(out, ct.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    save_state(state_path, &state)?;
    eprintln!(
        "encrypted {} bytes on channel ({i}, {j}), counter {}, {} of {} bits used",
        bytes.len(),
        ct.counter,
        state.consumed,
        view.l()
    );
    Ok(0)
}

fn cmd_decrypt(keystore: &Path, node: Option<u32>, input: &Path, out: &Path, state_path: &Path, d: usize) -> Result<u8> {
    let view = load_material(keystore, node)?;
    let bytes = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let ct = CipherText::from_bytes(&bytes)?;
    let me = view.node();
    if me != ct.i && me != ct.j {
        bail!(itsnet::Error::InvalidArgument(format!(
            "ciphertext is for channel ({}, {}); node {me} is not an endpoint",
            ct.i, ct.j
        )));
    }
    let mut state = load_state(state_path, ct.i, ct.j, d)?;
    let plaintext = decrypt(&view, &mut state, &ct)?;
    fs::write(out, plaintext.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    save_state(state_path, &state)?;
    Ok(0)
}

fn parse_blocked(items: &[String]) -> Result<Vec<(NodeId, NodeId)>> {
    items
        .iter()
        .map(|item| {
            let (a, b) = item
                .split_once('-')
                .ok_or_else(|| itsnet::Error::InvalidArgument(format!("blocked channel {item:?} is not i-j")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<NodeId>()
                    .map_err(|_| itsnet::Error::InvalidArgument(format!("bad node in {item:?}")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn cmd_multipath(
    topology: &Path,
    s: NodeId,
    dst: NodeId,
    t: usize,
    m: u64,
    blocked: &[String],
    seed: Seed,
) -> Result<u8> {
    let text = fs::read_to_string(topology).with_context(|| format!("reading {}", topology.display()))?;
    let g = Topology::from_json(&text)?;
    let blocked_pairs = parse_blocked(blocked)?;
    let config = json!({
        "command": "multipath",
        "topology": topology.display().to_string(),
        "s": s,
        "dst": dst,
        "t": t,
        "m": m,
        "blocked": blocked,
        "seed": seed_json(seed),
    });
    match plan(&g, s, dst, t, m, &blocked_pairs)? {
        Ok(p) => {
            print_json(&json!({ "config": config, "plan": p }))?;
            Ok(0)
        }
        Err(search) => {
            print_json(&json!({ "config": config, "infeasible": search }))?;
            Ok(1)
        }
    }
}
