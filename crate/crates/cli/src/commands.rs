use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;

use fusionlab::constructors::{
    affine_ar, fixture, lattice_data, quantum_double, root_lattice_a, root_lattice_e8, FiniteGroup,
};
use fusionlab::invariants::{enumerate_invariants, ModularInvariant};
use fusionlab::modular_data::{
    congruence_check, galois_report, verify_axioms, AxiomReport, MdLevel, ModularData, Verdict,
};
use fusionlab::nimreps::{
    fusion_graph, match_invariants, nimrep_exponents, search_nimreps, search_nimreps_with_exponents,
    NimSearch, SearchOptions,
};
use fusionlab::IntMatrix;

use crate::catalog::{Catalog, DataDoc, InvariantDoc, Kind, NimRepDoc, NimRepSearchRecord, Provenance};
use crate::{Cli, CliError, Command, ConstructArgs, NimRepArgs};

type Outcome = Result<String, (String, CliError)>;

fn fail(e: CliError) -> (String, CliError) {
    (String::new(), e)
}

pub fn run(cli: &Cli) -> Outcome {
    let home = cli
        .home
        .clone()
        .or_else(|| std::env::var_os("FUSIONLAB_HOME").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("fusionlab-catalog"));
    let cat = Catalog::open(home);
    let line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    let out = match &cli.command {
        Command::Construct(args) => construct(&cat, args, cli.json),
        Command::Verify { name, md_level } => verify(&cat, name, *md_level, cli.json),
        Command::ClassifyMi { name, budget } => classify(&cat, name, *budget, cli.json),
        Command::Nimrep(args) => nimrep(&cat, args, cli.json),
        Command::Galois { name } => galois(&cat, name, cli.json).map_err(fail),
        Command::Fusion { name, a, b } => fusion(&cat, name, a, b, cli.json).map_err(fail),
        Command::Graph {
            name,
            label,
            index,
            out,
        } => graph(&cat, name, label, *index, out.as_ref()).map_err(fail),
        Command::List => Ok(list(&cat)),
    };
    let writes = matches!(
        cli.command,
        Command::Construct(_) | Command::ClassifyMi { .. } | Command::Nimrep(_)
    );
    if writes {
        let _ = cat.log_run(&line, start.elapsed().as_micros());
    }
    out
}

fn provenance(command: &str, options: &[(&str, String)]) -> Provenance {
    Provenance {
        command: command.to_string(),
        options: options.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

// ---------------------------------------------------------------------------
// construct / verify

fn parse_gram(spec: &str) -> Result<IntMatrix, CliError> {
    let rows: Vec<Vec<i64>> = match spec {
        "E8" => return Ok(root_lattice_e8()),
        s if s.starts_with('A') && s[1..].parse::<usize>().is_ok() => {
            let r: usize = s[1..].parse().expect("checked");
            if r == 0 {
                return Err(input("A0 is not a root lattice"));
            }
            return Ok(root_lattice_a(r));
        }
        s => serde_json::from_str(s).map_err(|e| input(format!("lattice Gram matrix: {e}")))?,
    };
    IntMatrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect(),
    )
    .map_err(input)
}

fn parse_group(spec: &str) -> Result<FiniteGroup, CliError> {
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| input(format!("bad group parameter '{s}'")))
    };
    let group = match spec.split_once(':') {
        Some(("cyclic", n)) => FiniteGroup::cyclic(num(n)?.max(1)),
        Some(("dihedral", m)) => FiniteGroup::dihedral(num(m)?.max(1)),
        Some(("symmetric", n)) => FiniteGroup::symmetric(num(n)?.max(1)),
        None if spec == "quaternion" => FiniteGroup::quaternion(),
        _ => {
            let text = if spec.trim_start().starts_with('[') {
                spec.to_string()
            } else {
                std::fs::read_to_string(spec).map_err(|_| input(format!("unknown group '{spec}'")))?
            };
            let table: Vec<Vec<usize>> =
                serde_json::from_str(&text).map_err(|e| input(format!("group table: {e}")))?;
            FiniteGroup::from_table(table).map_err(input)?
        }
    };
    Ok(group)
}

fn axiom_lines(report: &AxiomReport) -> String {
    let mut s = String::new();
    for r in &report.results {
        let _ = match &r.verdict {
            Verdict::Pass { .. } => writeln!(s, "  {}: pass", r.axiom),
            Verdict::Fail { witness, detail } => writeln!(s, "  {}: FAIL at {witness:?} {detail}", r.axiom),
            Verdict::Inconclusive { detail } => writeln!(s, "  {}: inconclusive ({detail})", r.axiom),
        };
    }
    s
}

fn construct(cat: &Catalog, args: &ConstructArgs, json: bool) -> Outcome {
    let (md, default_name, source) = if let Some(spec) = &args.lattice {
        let gram = parse_gram(spec).map_err(fail)?;
        let name = format!("lattice-{}", spec.replace(['[', ']', ' '], ""));
        (
            lattice_data(&gram).map_err(|e| fail(input(e)))?,
            name,
            ("lattice", spec.clone()),
        )
    } else if let Some(spec) = &args.affine {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let (r, k) = match parts.as_slice() {
            [series, r, k] if series.eq_ignore_ascii_case("A") => (
                r.parse::<usize>().map_err(|_| fail(input("bad rank")))?,
                k.parse::<u32>().map_err(|_| fail(input("bad level")))?,
            ),
            _ => {
                return Err(fail(input(
                    "affine spec must be A,rank,level (only series A is supported)",
                )))
            }
        };
        (
            affine_ar(r, k).map_err(|e| fail(input(e)))?,
            format!("A{r}k{k}"),
            ("affine", spec.clone()),
        )
    } else if let Some(spec) = &args.group {
        let g = parse_group(spec).map_err(fail)?;
        let name = format!("double-{}", spec.replace([':', '[', ']', ' ', '/'], ""));
        (
            quantum_double(&g).map_err(|e| fail(input(e)))?,
            name,
            ("group", spec.clone()),
        )
    } else if let Some(spec) = &args.fixture {
        (
            fixture(spec).map_err(|e| fail(input(e)))?,
            spec.clone(),
            ("fixture", spec.clone()),
        )
    } else {
        return Err(fail(input(
            "one of --lattice, --affine, --group, --fixture is required",
        )));
    };
    let name = args.name.clone().unwrap_or(default_name);
    let report = verify_axioms(&md, &args.md_level.options());
    let valid = report.all_pass();
    let mut text = format!(
        "{name}: rank {}, conductor {}, T order {}\n{}",
        md.rank(),
        md.conductor(),
        md.t_order(),
        axiom_lines(&report)
    );
    if !valid && !args.allow_invalid {
        return Err((
            text,
            CliError::Verification(format!("{name} fails {:?} (not stored)", report.failed())),
        ));
    }
    let doc = DataDoc {
        name: name.clone(),
        valid,
        failed: report.failed(),
        axioms: report.results.clone(),
        modular_data: md.to_json(),
        provenance: provenance(
            "construct",
            &[(source.0, source.1), ("md-level", format!("{:?}", args.md_level))],
        ),
    };
    let path = cat.save(Kind::Data, &name, &doc).map_err(fail)?;
    if json {
        text = serde_json::to_string_pretty(&doc).map_err(|e| fail(e.into()))? + "\n";
    } else {
        let _ = writeln!(text, "stored {}", path.display());
    }
    Ok(text)
}

fn load_data(cat: &Catalog, name: &str) -> Result<(DataDoc, ModularData), CliError> {
    let doc: DataDoc = cat.load(Kind::Data, name)?;
    let md = ModularData::from_json(&doc.modular_data).map_err(input)?;
    Ok((doc, md))
}

fn load_valid(cat: &Catalog, name: &str) -> Result<ModularData, CliError> {
    let (doc, md) = load_data(cat, name)?;
    if !doc.valid {
        return Err(CliError::Verification(format!(
            "{name} was stored with failures {:?}",
            doc.failed
        )));
    }
    Ok(md)
}

fn verify(cat: &Catalog, name: &str, level: MdLevel, json: bool) -> Outcome {
    let (_, md) = load_data(cat, name).map_err(fail)?;
    let report = verify_axioms(&md, &level.options());
    let text = if json {
        serde_json::to_string_pretty(&report).map_err(|e| fail(e.into()))? + "\n"
    } else {
        format!("{name}\n{}", axiom_lines(&report))
    };
    if report.all_pass() {
        Ok(text)
    } else {
        Err((
            text,
            CliError::Verification(format!("{name} fails {:?}", report.failed())),
        ))
    }
}

// ---------------------------------------------------------------------------
// modular invariants

fn classify(cat: &Catalog, name: &str, budget: u64, json: bool) -> Outcome {
    let md = load_valid(cat, name).map_err(fail)?;
    let e = enumerate_invariants(&md, budget).map_err(|e| fail(input(e)))?;
    let doc = InvariantDoc {
        datum: name.to_string(),
        complete: e.complete,
        nodes: e.nodes,
        budget: e.budget,
        commutant_dim: e.commutant_dim,
        sum_bound: e.sum_bound,
        rules: e.rules.clone(),
        exponents: e.invariants.iter().map(ModularInvariant::exponents).collect(),
        invariants: e.invariants.clone(),
        provenance: provenance("classify-mi", &[("budget", budget.to_string())]),
    };
    let path = cat.save(Kind::Invariants, name, &doc).map_err(fail)?;
    let mut text = String::new();
    if json {
        text = serde_json::to_string_pretty(&doc).map_err(|e| fail(e.into()))? + "\n";
    } else {
        let _ = writeln!(
            text,
            "{name}: {} modular invariant(s), {} ({} nodes, commutant dimension {}, Σ M ≤ {})",
            e.invariants.len(),
            if e.complete { "complete" } else { "PARTIAL" },
            e.nodes,
            e.commutant_dim,
            e.sum_bound
        );
        for (i, m) in e.invariants.iter().enumerate() {
            let _ = writeln!(text, "{}: {}", i + 1, m.render(md.labels()));
        }
        let _ = writeln!(text, "stored {}", path.display());
    }
    if e.complete {
        Ok(text)
    } else {
        Err((
            text,
            CliError::Budget(format!("{} nodes; the list may be partial", e.nodes)),
        ))
    }
}

// ---------------------------------------------------------------------------
// NIM-reps

fn label_index(md: &ModularData, s: &str) -> Result<usize, CliError> {
    md.label_index(s)
        .or_else(|| s.parse::<usize>().ok().filter(|&i| i < md.rank()))
        .ok_or_else(|| input(format!("unknown label '{s}'")))
}

fn record(s: &NimSearch) -> NimRepSearchRecord {
    NimRepSearchRecord {
        dim: s.dim,
        target: s.target.clone(),
        complete: s.complete,
        nodes: s.nodes,
        found: s.nimreps.len(),
        dropped_mandatory: s.dropped_mandatory,
    }
}

fn show_exponents(md: &ModularData, ex: &[usize]) -> String {
    let l: Vec<&str> = ex.iter().map(|&b| md.labels()[b].as_str()).collect();
    format!("{{{}}}", l.join(", "))
}

fn nimrep(cat: &Catalog, args: &NimRepArgs, json: bool) -> Outcome {
    let name = &args.name;
    let md = load_valid(cat, name).map_err(fail)?;
    let opts = SearchOptions {
        budget: args.budget,
        strict_mandatory: args.strict_mandatory,
    };
    let err = |e: fusionlab::nimreps::NimRepError| fail(input(e));
    let mut searches = Vec::new();
    let mut invariants = None;
    let (default_name, option) = if let Some(d) = args.dim {
        searches.push(search_nimreps(&md, d, &opts).map_err(err)?);
        (format!("{name}-dim{d}"), ("dim", d.to_string()))
    } else if let Some(spec) = &args.exponents {
        let ex = spec
            .split(',')
            .map(|s| label_index(&md, s.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        searches.push(search_nimreps_with_exponents(&md, &ex, &opts).map_err(err)?);
        let tag: Vec<String> = ex.iter().map(usize::to_string).collect();
        (format!("{name}-ex{}", tag.join("_")), ("exponents", spec.clone()))
    } else if args.match_invariants {
        let doc: InvariantDoc = cat.load(Kind::Invariants, name).map_err(|_| {
            fail(input(format!(
                "no stored invariants for '{name}'; run classify-mi first"
            )))
        })?;
        let dims: BTreeSet<usize> = doc.invariants.iter().map(|m| m.trace().max(0) as usize).collect();
        for d in dims {
            searches.push(search_nimreps(&md, d, &opts).map_err(err)?);
        }
        invariants = Some(doc.invariants);
        (
            format!("{name}-match"),
            ("match", "traces of stored invariants".to_string()),
        )
    } else {
        return Err(fail(input("one of --dim, --exponents, --match is required")));
    };
    let save_as = args.save_as.clone().unwrap_or(default_name);
    let nimreps: Vec<_> = searches.iter().flat_map(|s| s.nimreps.iter().cloned()).collect();
    let exponents: Vec<Vec<usize>> = searches
        .iter()
        .flat_map(|s| s.exponents.iter().cloned())
        .collect();
    let complete = searches.iter().all(|s| s.complete);
    let matching = invariants
        .as_ref()
        .map(|inv| match_invariants(&md, &nimreps, inv, args.strict_mandatory));
    let doc = NimRepDoc {
        datum: name.clone(),
        complete,
        budget: args.budget,
        strict_mandatory: args.strict_mandatory,
        generators: searches.first().map(|s| s.generators.clone()).unwrap_or_default(),
        searches: searches.iter().map(record).collect(),
        nimreps,
        exponents,
        matching,
        provenance: provenance(
            "nimrep",
            &[
                option,
                ("budget", args.budget.to_string()),
                ("strict-mandatory", args.strict_mandatory.to_string()),
            ],
        ),
    };
    let path = cat.save(Kind::NimReps, &save_as, &doc).map_err(fail)?;
    let mut text = String::new();
    if json {
        text = serde_json::to_string_pretty(&doc).map_err(|e| fail(e.into()))? + "\n";
    } else {
        for s in &searches {
            let _ = writeln!(
                text,
                "dim {}: {} NIM-rep(s), {} ({} nodes){}",
                s.dim,
                s.nimreps.len(),
                if s.complete { "exhaustive" } else { "PARTIAL" },
                s.nodes,
                if s.dropped_mandatory > 0 {
                    format!(
                        ", {} rejected by the mandatory-exponent rule",
                        s.dropped_mandatory
                    )
                } else {
                    String::new()
                }
            );
        }
        for (i, rep) in doc.nimreps.iter().enumerate() {
            let ex = nimrep_exponents(&md, rep).unwrap_or_default();
            let _ = writeln!(
                text,
                "  [{i}] dim {} exponents {}",
                rep.dim(),
                show_exponents(&md, &ex)
            );
        }
        if let (Some(m), Some(inv)) = (&doc.matching, &invariants) {
            let _ = writeln!(text, "mandatory exponents: {}", show_exponents(&md, &m.mandatory));
            for (i, p) in m.invariant_partners.iter().enumerate() {
                let _ = writeln!(
                    text,
                    "invariant {}: {} ↔ {}",
                    i + 1,
                    inv[i].render(md.labels()),
                    if p.is_empty() {
                        "no NIM-rep".to_string()
                    } else {
                        format!("NIM-rep(s) {p:?}")
                    }
                );
            }
            for &i in &m.unmatched_nimreps {
                let st = &m.nimreps[i];
                let why = if st.missing_mandatory.is_empty() {
                    String::new()
                } else {
                    format!(
                        " (misses mandatory {})",
                        show_exponents(&md, &st.missing_mandatory)
                    )
                };
                let _ = writeln!(text, "NIM-rep [{i}] has no invariant{why}");
            }
        }
        let _ = writeln!(text, "stored {}", path.display());
    }
    if complete {
        Ok(text)
    } else {
        Err((
            text,
            CliError::Budget("NIM-rep search incomplete; results may be partial".into()),
        ))
    }
}

fn graph(
    cat: &Catalog,
    name: &str,
    label: &str,
    index: usize,
    out: Option<&PathBuf>,
) -> Result<String, CliError> {
    let doc: NimRepDoc = cat.load(Kind::NimReps, name)?;
    let (_, md) = load_data(cat, &doc.datum)?;
    let a = label_index(&md, label)?;
    let rep = doc
        .nimreps
        .get(index)
        .ok_or_else(|| input(format!("{name} holds {} NIM-rep(s)", doc.nimreps.len())))?;
    let dot = fusion_graph(rep, a).to_dot(&format!("{name}[{index}] label {}", md.labels()[a]));
    match out {
        Some(p) => {
            std::fs::write(p, &dot)?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(dot),
    }
}

// ---------------------------------------------------------------------------
// Galois, fusion, listing

fn galois(cat: &Catalog, name: &str, json: bool) -> Result<String, CliError> {
    let (_, md) = load_data(cat, name)?;
    let report = galois_report(&md).map_err(input)?;
    let cong = congruence_check(&md, &report.action);
    if json {
        let v = serde_json::json!({ "galois": report, "congruence": cong });
        return Ok(serde_json::to_string_pretty(&v)? + "\n");
    }
    let labels = md.labels();
    let mut s = format!(
        "{name}: conductor {}, [Q(S):Q] = {}, composition {}, degree bound {}\n",
        md.conductor(),
        report.degree,
        if report.composition_ok { "ok" } else { "FAILS" },
        if report.degree_bound_ok { "ok" } else { "FAILS" }
    );
    for g in &report.action {
        let perm: Vec<String> = (0..md.rank())
            .map(|a| format!("{}→{}", labels[a], labels[g.perm[a]]))
            .collect();
        let signs: String = g.signs.iter().map(|&e| if e > 0 { '+' } else { '-' }).collect();
        let _ = writeln!(s, "ℓ={:<4} {}  parities {signs}", g.ell, perm.join(" "));
    }
    let _ = writeln!(
        s,
        "congruence T_σa = T_a^ℓ² for ℓ coprime to N = {}: {}",
        cong.t_order,
        if cong.holds() { "holds" } else { "FAILS" }
    );
    if cong.holds() {
        Ok(s)
    } else {
        Err(CliError::Verification(s))
    }
}

fn fusion(cat: &Catalog, name: &str, a: &str, b: &str, json: bool) -> Result<String, CliError> {
    let (_, md) = load_data(cat, name)?;
    let (ia, ib) = (label_index(&md, a)?, label_index(&md, b)?);
    let ring = md.fusion().map_err(input)?;
    let row: Vec<(String, String)> = (0..md.rank())
        .filter(|&c| !num_traits_zero(ring.n(ia, ib, c)))
        .map(|c| (md.labels()[c].clone(), ring.n(ia, ib, c).to_string()))
        .collect();
    if json {
        return Ok(serde_json::to_string_pretty(&row)? + "\n");
    }
    let terms: Vec<String> = row
        .iter()
        .map(|(l, n)| if n == "1" { l.clone() } else { format!("{n}·{l}") })
        .collect();
    let l = md.labels();
    Ok(format!(
        "{} × {} = {}\n",
        l[ia],
        l[ib],
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    ))
}

fn num_traits_zero(q: &fusionlab::Rational) -> bool {
    q.numer().sign() == num_bigint::Sign::NoSign
}

fn list(cat: &Catalog) -> String {
    let mut s = format!("catalog {}\n", cat.root().display());
    for (kind, title) in [
        (Kind::Data, "data"),
        (Kind::Invariants, "invariants"),
        (Kind::NimReps, "nimreps"),
    ] {
        let _ = writeln!(s, "{title}: {}", cat.list(kind).join(", "));
    }
    s
}
