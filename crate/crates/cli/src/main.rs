use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use coset_duality::{
    available, basis_for, basis_from_raw, build_w, check_axioms, lookup, round_trip, AutContext,
    BasisPolicy, Caps, CheckReport, GroupSpec, GroupoidJson, InverseSystem, InverseSystemJson,
    LevelFilter, MeetGroupoid, Perm, PermGroup, SubgroupFamily,
};

#[derive(Parser)]
#[command(
    name = "duality",
    version,
    about = "Coset meet groupoids of finite groups and the groups they reconstruct"
)]
struct Cli {
    /// Seed for the sampled isomorphism suites
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Enable the large catalog entries
    #[arg(long, global = true)]
    large: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in groups
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Build W(G) and validate it
    W {
        #[command(flatten)]
        input: GroupArgs,
        /// Include the full groupoid tables
        #[arg(long)]
        json: bool,
        /// Print the idempotent order as DOT instead of a report
        #[arg(long, conflicts_with = "json")]
        dot: bool,
    },
    /// Both unit isomorphisms and their naturality squares
    Roundtrip {
        #[command(flatten)]
        input: GroupArgs,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Aut(G) as the normalizer of the coset embedding modulo its centralizer
    Aut {
        #[command(flatten)]
        input: GroupArgs,
        /// Largest number of pinned cosets in the basis biconditional
        #[arg(long, default_value_t = 2)]
        max_cosets: usize,
    },
    /// Check a groupoid file against the axioms
    Validate {
        file: PathBuf,
        /// Skip the level-up and level-down clauses
        #[arg(long)]
        no_fullness: bool,
    },
    /// Write W(G) or a groupoid file in another format
    Export {
        #[command(flatten)]
        input: GroupArgs,
        /// Groupoid JSON to export instead of building W(G)
        #[arg(long, conflicts_with = "group")]
        file: Option<PathBuf>,
        #[arg(long)]
        dot: bool,
    },
    /// Full round trip for a group read from a file
    VerifyDuality {
        group_file: PathBuf,
        #[arg(long, default_value = "all")]
        basis: BasisPolicy,
        #[arg(long)]
        basis_file: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Inverse systems and their truncations
    Profinite {
        #[command(subcommand)]
        command: ProfiniteCommand,
    },
}

#[derive(Subcommand)]
enum ProfiniteCommand {
    /// Compare the lazy and eager truncations at every depth
    Demo {
        #[command(flatten)]
        tower: TowerArgs,
    },
    /// Lift the filter of an element at one depth to a deeper one
    Refine {
        #[command(flatten)]
        tower: TowerArgs,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        element: usize,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// Catalog name, group JSON file, or generators in cycle notation separated by commas
    #[arg(long, default_value = "trivial")]
    group: String,
    /// Basis policy; defaults to the catalog entry's policy, else `all`
    #[arg(long)]
    basis: Option<BasisPolicy>,
    /// JSON list of subgroups (element indices), closed under conjugation and meets
    #[arg(long)]
    basis_file: Option<PathBuf>,
}

#[derive(Args)]
struct TowerArgs {
    /// `2adic`, `dihedral`, or a tower JSON file
    #[arg(long, default_value = "2adic")]
    tower: String,
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

enum Failure {
    /// A mathematical check failed; the report has already been printed.
    Check,
    Precondition(String),
}

impl From<coset_duality::Error> for Failure {
    fn from(e: coset_duality::Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Precondition(format!("invalid JSON: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let caps = Caps::default();
    match &cli.command {
        Command::Catalog { json } => catalog(cli.large, *json, &caps),
        Command::W { input, json, dot } => cmd_w(input, cli.large, *json, *dot, &caps),
        Command::Roundtrip { input, samples } => {
            let (group, family) = resolve(input, cli.large, &caps)?;
            report_round_trip(&group, &family, *samples, cli.seed, &caps)
        }
        Command::Aut { input, max_cosets } => cmd_aut(input, cli.large, *max_cosets),
        Command::Validate { file, no_fullness } => cmd_validate(file, !no_fullness),
        Command::Export { input, file, dot } => {
            cmd_export(input, file.as_deref(), *dot, cli.large, &caps)
        }
        Command::VerifyDuality {
            group_file,
            basis,
            basis_file,
            samples,
        } => {
            let spec: GroupSpec = serde_json::from_str(&fs::read_to_string(group_file)?)?;
            let group = PermGroup::from_spec(&spec, &caps)?;
            let family = family_for(&group, *basis, basis_file.as_deref(), &caps)?;
            report_round_trip(&group, &family, *samples, cli.seed, &caps)
        }
        Command::Profinite { command } => match command {
            ProfiniteCommand::Demo { tower } => profinite_demo(tower, &caps),
            ProfiniteCommand::Refine {
                tower,
                from,
                element,
            } => profinite_refine(tower, *from, *element, &caps),
        },
    }
}

fn emit(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    emit(&format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn verdict(passed: bool) -> Outcome {
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn parse_generators(text: &str) -> Result<PermGroup, Failure> {
    let degree = text
        .split(|c: char| !c.is_ascii_digit())
        .filter_map(|t| t.parse::<usize>().ok())
        .max()
        .map_or(1, |m| m + 1);
    let gens = text
        .split(',')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(|g| Perm::parse_cycles(degree, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PermGroup::generate(degree, &gens, &Caps::default())?.with_name(text))
}

fn load_group(arg: &str, large: bool, caps: &Caps) -> Result<(PermGroup, BasisPolicy), Failure> {
    if arg.trim_start().starts_with('(') {
        return Ok((parse_generators(arg)?, BasisPolicy::All));
    }
    if arg.ends_with(".json") || Path::new(arg).is_file() {
        let spec: GroupSpec = serde_json::from_str(&fs::read_to_string(arg)?)?;
        return Ok((PermGroup::from_spec(&spec, caps)?, BasisPolicy::All));
    }
    let entry = lookup(arg, large)?;
    Ok((entry.group(caps)?, entry.default_basis))
}

fn family_for(
    group: &PermGroup,
    policy: BasisPolicy,
    file: Option<&Path>,
    caps: &Caps,
) -> Result<SubgroupFamily, Failure> {
    match file {
        Some(path) => {
            let raw: Vec<Vec<usize>> = serde_json::from_str(&fs::read_to_string(path)?)?;
            Ok(basis_from_raw(group, &raw, caps)?)
        }
        None => Ok(basis_for(group, policy, caps)?),
    }
}

fn resolve(
    input: &GroupArgs,
    large: bool,
    caps: &Caps,
) -> Result<(PermGroup, SubgroupFamily), Failure> {
    let (group, default) = load_group(&input.group, large, caps)?;
    let family = family_for(
        &group,
        input.basis.unwrap_or(default),
        input.basis_file.as_deref(),
        caps,
    )?;
    Ok((group, family))
}

fn catalog(large: bool, as_json: bool, caps: &Caps) -> Outcome {
    let entries = available(large);
    if as_json {
        return print_json(&entries);
    }
    let mut text = format!("{:<8} {:>6} {:>7}  basis\n", "name", "degree", "order");
    for e in entries {
        text += &format!(
            "{:<8} {:>6} {:>7}  {}\n",
            e.name,
            e.spec.degree,
            e.group(caps)?.order(),
            e.default_basis
        );
    }
    emit(&text)
}

fn cmd_w(input: &GroupArgs, large: bool, full: bool, dot: bool, caps: &Caps) -> Outcome {
    let (group, family) = resolve(input, large, caps)?;
    let w = build_w(&group, &family)?;
    let report = check_axioms(w.groupoid(), true);
    if dot {
        emit(&w.groupoid().idempotent_dot())?;
        return verdict(report.passed);
    }
    let mut out = json!({
        "group": group.name(),
        "order": group.order(),
        "basis": family.members().iter().map(|s| s.elements().to_vec()).collect::<Vec<_>>(),
        "carrier": w.size(),
        "report": report,
    });
    if full {
        out["groupoid"] = serde_json::to_value(w.to_json())?;
    }
    print_json(&out)?;
    verdict(report.passed)
}

fn report_round_trip(
    group: &PermGroup,
    family: &SubgroupFamily,
    samples: usize,
    seed: u64,
    caps: &Caps,
) -> Outcome {
    let report = round_trip(group, family, samples, seed, caps)?;
    print_json(&report)?;
    verdict(report.passed)
}

#[derive(Serialize)]
struct AutReport {
    group: String,
    order: usize,
    basis_size: usize,
    center_order: usize,
    /// Automorphisms as element maps, one per outer class.
    out_representatives: Vec<Vec<usize>>,
    checks: Vec<CheckReport>,
    passed: bool,
}

fn cmd_aut(input: &GroupArgs, large: bool, max_cosets: usize) -> Outcome {
    let caps = Caps::aut_suite();
    let (group, family) = resolve(input, large, &caps)?;
    let ctx = AutContext::new(&group, &family, &caps)?;
    let checks = vec![
        ctx.check_section(),
        ctx.check_inner(),
        ctx.check_inn_center(),
        ctx.check_centralizer_kernel(),
        ctx.check_split_extension(&caps),
        ctx.check_biconditional(max_cosets),
        ctx.check_stabilizers_separate(),
    ];
    let aut = ctx.aut();
    let report = AutReport {
        group: group.name().to_string(),
        order: group.order(),
        basis_size: family.len(),
        center_order: aut.center_order,
        out_representatives: aut
            .out_reps
            .iter()
            .map(|&i| aut.automorphism(i).map().to_vec())
            .collect(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    };
    print_json(&report)?;
    verdict(report.passed)
}

fn read_groupoid(file: &Path) -> Result<MeetGroupoid, Failure> {
    let json: GroupoidJson = serde_json::from_str(&fs::read_to_string(file)?)?;
    Ok(MeetGroupoid::from_json(&json)?)
}

fn cmd_validate(file: &Path, fullness: bool) -> Outcome {
    let m = read_groupoid(file)?;
    let report = check_axioms(&m, fullness);
    print_json(&json!({ "size": m.size(), "fullness": fullness, "report": report }))?;
    verdict(report.passed)
}

fn cmd_export(
    input: &GroupArgs,
    file: Option<&Path>,
    dot: bool,
    large: bool,
    caps: &Caps,
) -> Outcome {
    let m = match file {
        Some(path) => read_groupoid(path)?,
        None => {
            let (group, family) = resolve(input, large, caps)?;
            let w = build_w(&group, &family)?;
            if !dot {
                return print_json(&w.to_json());
            }
            w.groupoid().clone()
        }
    };
    if dot {
        emit(&m.idempotent_dot())
    } else {
        print_json(&m.to_json())
    }
}

fn load_tower(args: &TowerArgs, caps: &Caps) -> Result<InverseSystem, Failure> {
    match args.tower.as_str() {
        "2adic" => Ok(InverseSystem::two_adic(args.depth)?),
        "dihedral" => Ok(InverseSystem::dihedral(args.depth)?),
        path => {
            let json: InverseSystemJson = serde_json::from_str(&fs::read_to_string(path)?)?;
            let sys = InverseSystem::from_json(&json, caps)?;
            if args.depth > sys.depth() {
                return Err(coset_duality::Error::Depth {
                    depth: args.depth,
                    max: sys.depth(),
                }
                .into());
            }
            Ok(sys)
        }
    }
}

#[derive(Serialize)]
struct DepthReport {
    depth: usize,
    order: usize,
    kernel_orders: Vec<usize>,
    carrier: usize,
    lazy_matches_eager: bool,
    filters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient_to_previous: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

fn profinite_demo(args: &TowerArgs, caps: &Caps) -> Outcome {
    let sys = load_tower(args, caps)?;
    let mut depths = Vec::new();
    for d in 0..=args.depth {
        let (g, family) = sys.truncate(d)?;
        let lazy = sys.lazy_truncation(d)?;
        let agreement = sys.lazy_eager_agree(d);
        let lazy_matches_eager = agreement.is_ok();
        let mut witness = agreement.err().map(|e| e.to_string());
        let quotient = if d > 0 {
            let q = sys.check_quotient(d - 1)?;
            let ok = q.is_none();
            witness = witness.or(q);
            Some(ok)
        } else {
            None
        };
        depths.push(DepthReport {
            depth: d,
            order: g.order(),
            kernel_orders: family.members().iter().map(|s| s.order()).collect(),
            carrier: lazy.groupoid.size(),
            lazy_matches_eager,
            filters: sys.filter_count(d)?,
            quotient_to_previous: quotient,
            witness,
        });
    }
    let passed = depths.iter().all(|r| {
        r.lazy_matches_eager && r.filters == r.order && r.quotient_to_previous != Some(false)
    });
    print_json(
        &json!({ "tower": args.tower, "depth": args.depth, "levels": depths, "passed": passed }),
    )?;
    verdict(passed)
}

fn profinite_refine(args: &TowerArgs, from: usize, element: usize, caps: &Caps) -> Outcome {
    let sys = load_tower(args, caps)?;
    if element >= sys.level(from)?.order() {
        return Err(Failure::Precondition(format!(
            "element {element} is not in level {from}"
        )));
    }
    let start = LevelFilter::from_element(&sys, from, element)?;
    let lifts = sys.refine_filter(&start, args.depth)?;
    print_json(&json!({
        "from": { "depth": from, "element": element },
        "target": args.depth,
        "lifts": lifts.iter().map(LevelFilter::top).collect::<Vec<_>>(),
    }))
}
