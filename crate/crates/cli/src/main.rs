use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cforge_core::algebra::{centralizer_orbit_count, product_support};
use cforge_core::cache::{cache_key, ArtifactKind, Store};
use cforge_core::verify::{self, Verdict, VerifierReport};
use cforge_core::zoo::{self, GroupMeta, GroupSpec};
use cforge_core::{Caps, Error, Result};

#[derive(Parser)]
#[command(name = "cforge", version, about = "Exact conjugacy class product computations on small finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Group spec: a JSON file path or inline JSON such as '{"family":"Alt","n":5}'
    #[arg(long, global = true)]
    group: Option<String>,
    /// Directory for cached class and character tables
    #[arg(long, global = true, env = "CFORGE_CACHE")]
    cache_dir: Option<PathBuf>,
    /// Largest group order allowed
    #[arg(long, global = true)]
    cap_order: Option<u128>,
    /// Largest conjugacy class enumerated
    #[arg(long, global = true)]
    cap_class: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Prime for the characteristic-dependent and p-element checks
    #[arg(long, global = true)]
    p: Option<u64>,
    /// Class pair as "i,j"
    #[arg(long, global = true, value_parser = parse_pair)]
    classes: Option<(usize, usize)>,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugacy classes
    Classes,
    /// Irreducible character table
    Chartab,
    /// Classes met by the product of two classes, with structure constants
    Product,
    /// Number of C(a)-orbits on the class of b for class representatives a, b
    Dcoset,
    /// No product of two nontrivial classes is a single class
    Ah,
    /// The group is not C(a)C(b) for nontrivial a, b
    Szep,
    /// Fixed-point counts are non-constant on class products
    Fixchar {
        /// Subgroup spec (default: Alt in Sym, PSL in PGL, else the group)
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// The Steinberg character is non-constant on semisimple class products
    Steinberg,
    /// Products of unipotent classes contain non-unipotent elements
    Unip,
    /// Baer–Suzuki style pair condition over classes of p-elements
    Bs,
    /// Nonsolvable and non-p-element conjugate pairs of order-p elements
    Bsas,
    /// Least primitive prime divisor of q^n - 1
    Zsig {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
    },
    /// Small groups where class products behave exceptionally
    DemoCounterexamples,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    let p = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

fn read_spec(text: &str) -> Result<GroupSpec> {
    if text.trim_start().starts_with('{') {
        GroupSpec::parse(text)
    } else {
        let body = std::fs::read_to_string(text)?;
        GroupSpec::parse(&body)
    }
}

impl Opts {
    fn caps(&self) -> Caps {
        let d = Caps::default();
        Caps {
            max_degree: d.max_degree,
            max_order: self.cap_order.unwrap_or(d.max_order),
            max_class: self.cap_class.unwrap_or(d.max_class),
        }
    }

    fn meta(&self) -> Result<GroupMeta> {
        let text = self
            .group
            .as_deref()
            .ok_or_else(|| Error::BadSpec("--group is required".into()))?;
        zoo::make_group_with_caps(&read_spec(text)?, self.caps())
    }

    fn pair(&self, t_len: usize) -> Result<(usize, usize)> {
        let (i, j) = self
            .classes
            .ok_or_else(|| Error::BadSpec("--classes i,j is required".into()))?;
        if i >= t_len || j >= t_len {
            return Err(Error::BadSpec(format!("class index out of range (0..{t_len})")));
        }
        Ok((i, j))
    }

    fn prime(&self) -> Result<u64> {
        self.p.ok_or_else(|| Error::BadSpec("--p is required".into()))
    }
}

enum Outcome {
    Done(Value),
    /// A computation whose answer is negative (exit status 1).
    Failed(Value),
    Report(VerifierReport),
}

fn run(cmd: &Command, opts: &Opts, store: &Store) -> Result<Outcome> {
    use Outcome::*;
    Ok(match cmd {
        Command::Classes => {
            let meta = opts.meta()?;
            let t = store.classes(&meta)?;
            let classes: Vec<Value> = (0..t.len())
                .map(|i| {
                    json!({
                        "index": i,
                        "order": t.element_order(i),
                        "size": t.size(i).to_string(),
                        "centralizer_order": t.centralizer_order(i).to_string(),
                        "cycle_type": t.rep(i).cycle_type(),
                        "rep": t.rep(i),
                    })
                })
                .collect();
            Done(json!({
                "spec": meta.spec,
                "order": meta.order().to_string(),
                "degree": meta.group.degree(),
                "characteristic": meta.characteristic,
                "action": meta.action,
                "classes": classes,
                "inverse_map": t.inverse_map(),
                "cache_keys": [cache_key(&meta.spec, ArtifactKind::Classes)],
            }))
        }
        Command::Chartab => {
            let meta = opts.meta()?;
            let ct = store.chartab(&meta)?;
            let t = ct.classes();
            let data = ct.to_data();
            Done(json!({
                "spec": meta.spec,
                "order": meta.order().to_string(),
                "class_orders": (0..t.len()).map(|i| t.element_order(i)).collect::<Vec<_>>(),
                "class_sizes": t.sizes().iter().map(u128::to_string).collect::<Vec<_>>(),
                "degrees": ct.degrees(),
                "values": (0..ct.len()).map(|r| ct.row(r).to_vec()).collect::<Vec<_>>(),
                "exponent": data.exponent,
                "dixon_prime": data.dixon_prime,
                "verification_primes": data.verification_primes,
                "cache_keys": [
                    cache_key(&meta.spec, ArtifactKind::Classes),
                    cache_key(&meta.spec, ArtifactKind::Chartab),
                ],
            }))
        }
        Command::Product => {
            let meta = opts.meta()?;
            let t = store.classes(&meta)?;
            let (i, j) = opts.pair(t.len())?;
            let s = product_support(&t, i, j)?;
            Done(json!({"spec": meta.spec, "support": s, "support_size": s.len()}))
        }
        Command::Dcoset => {
            let meta = opts.meta()?;
            let t = store.classes(&meta)?;
            let (i, j) = opts.pair(t.len())?;
            let dc = centralizer_orbit_count(&meta.group, t.rep(i), t.rep(j))?;
            Done(json!({"spec": meta.spec, "classes": [i, j], "count": dc.count, "orbit_sizes": dc.orbit_sizes}))
        }
        Command::Ah => Report(verify::verify_arad_herzog(&opts.meta()?, store)?),
        Command::Szep => Report(verify::verify_szep(&opts.meta()?, store)?),
        Command::Fixchar { subgroup } => {
            let g = opts.meta()?;
            let hspec = match subgroup {
                Some(s) => read_spec(s)?,
                None => verify::default_subgroup(&g.spec),
            };
            let h = zoo::make_group_with_caps(&hspec, opts.caps())?;
            Report(verify::verify_fixed_point_nonconstancy(&g, &h, store)?)
        }
        Command::Steinberg => Report(verify::verify_steinberg_nonconstancy(&opts.meta()?, store)?),
        Command::Unip => Report(verify::verify_unipotent_products(&opts.meta()?, store)?),
        Command::Bs => Report(verify::verify_bs_theorem(&opts.meta()?, store, opts.prime()?)?),
        Command::Bsas => {
            let meta = opts.meta()?;
            match opts.classes {
                Some(_) => {
                    let t = store.classes(&meta)?;
                    let (i, j) = opts.pair(t.len())?;
                    let p = opts.prime()?;
                    let pr = verify::bsas_probe(&meta.group, t.rep(i), t.rep(j), p)?;
                    let found = pr.nonsolvable.is_some() && pr.non_p_product.is_some();
                    let v = json!({"spec": meta.spec, "classes": [i, j], "p": p, "probe": pr, "both_found": found});
                    if found {
                        Done(v)
                    } else {
                        Failed(v)
                    }
                }
                None => Report(verify::verify_bsas(&meta, store, opts.p)?),
            }
        }
        Command::Zsig { q, n } => {
            if *q < 2 || *n < 2 {
                return Err(Error::BadSpec("zsig needs q >= 2 and n >= 2".into()));
            }
            Done(json!({"q": q, "n": n, "prime": zoo::zsigmondy(*q, *n)}))
        }
        Command::DemoCounterexamples => Report(verify::demo_counterexamples(store)?),
    })
}

/// Writes to stdout, ignoring a closed pipe (e.g. `cforge ... | head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let store = match &cli.opts.cache_dir {
        Some(dir) => match Store::at(dir) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Store::memory(),
    };
    let start = Instant::now();
    match run(&cli.command, &cli.opts, &store) {
        Ok(Outcome::Done(v)) => {
            emit(&serde_json::to_string_pretty(&v).expect("json"));
            eprintln!("done in {} ms", start.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Ok(Outcome::Failed(v)) => {
            emit(&serde_json::to_string_pretty(&v).expect("json"));
            eprintln!("negative result in {} ms", start.elapsed().as_millis());
            ExitCode::from(1)
        }
        Ok(Outcome::Report(r)) => {
            emit(&r.to_json());
            eprintln!(
                "{}: {:?} ({} cases, {} witnesses) in {} ms",
                r.verifier,
                r.verdict,
                r.cases.len(),
                r.witnesses.len(),
                start.elapsed().as_millis()
            );
            if r.verdict == Verdict::Fails {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
