use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crvr_core::community::louvain as run_louvain;
use crvr_core::diagram::{
    classify_structure, emit_diagram_csv, emit_diagram_svg, extract_features, Classification, SvgOptions,
    CLASSIFIER_VERSION,
};
use crvr_core::metrics::ari;
use crvr_core::netgen::{
    generate_block_network, generate_er_weighted, generate_noisy_block_network, BlockSpec, ErSpec,
};
use crvr_core::network::{load_network, save_network};
use crvr_core::seed::{RngInfo, Stage};
use crvr_core::wsbm::fit as fit_wsbm;
use crvr_core::{
    build_flag_filtration, compute_persistence, crvr_distance, Bars, Features, FlagFiltration, Network,
    WsbmConfig,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{AnalyzeArgs, CompareArgs, GenerateArgs, InputArgs, LouvainArgs, SeedArgs, TopologyArgs, WsbmArgs, WsbmCmdArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("input file {} not found", path.display())))
    }
}

/// `<path>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn seeds(args: &SeedArgs) -> Result<Vec<u64>, CliError> {
    (0..args.repeat)
        .map(|k| {
            args.seed
                .checked_add(k)
                .ok_or_else(|| usage("--seed + --repeat overflows u64"))
        })
        .collect()
}

/// `dir/name.ext` becomes `dir/name-seed<seed>.ext` when several seeds run.
fn seeded_path(path: &Path, seed: u64, repeat: u64) -> PathBuf {
    if repeat == 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    let name = match path.extension() {
        Some(ext) => format!("{stem}-seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}-seed{seed}"),
    };
    path.with_file_name(name)
}

fn seeded_dir(dir: &Path, seed: u64, repeat: u64) -> PathBuf {
    if repeat == 1 {
        dir.to_path_buf()
    } else {
        dir.join(format!("seed-{seed}"))
    }
}

/// Runs `job` once per seed, concurrently, then prints the returned lines in
/// seed order. The first error (in seed order) wins.
fn for_each_seed<F>(args: &SeedArgs, job: F) -> Result<(), CliError>
where
    F: Fn(u64) -> Result<String, CliError> + Sync,
{
    let results: Vec<Result<String, CliError>> = seeds(args)?.into_par_iter().map(&job).collect();
    let mut stdout = std::io::stdout().lock();
    for r in results {
        writeln!(stdout, "{}", r?)?;
    }
    Ok(())
}

fn to_json(value: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    ensure_parent(path)?;
    fs::write(path, to_json(value)?)?;
    Ok(())
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => Ok(fs::create_dir_all(p)?),
        _ => Ok(()),
    }
}

fn load(input: &InputArgs) -> Result<Network, CliError> {
    require_file(&input.input)?;
    Ok(load_network(&input.input, input.format)?)
}

fn labels_from_text(text: &str) -> Option<Vec<usize>> {
    let from_array = |v: &Value| -> Option<Vec<usize>> {
        v.as_array()?.iter().map(|x| x.as_u64().map(|u| u as usize)).collect()
    };
    match serde_json::from_str::<Value>(text) {
        Ok(v) if v.is_array() => from_array(&v),
        Ok(v) => v.get("planted_labels").and_then(from_array),
        Err(_) => text.split_whitespace().map(|t| t.parse().ok()).collect(),
    }
}

/// Ground-truth labels from `--labels`, or else from the generator sidecar
/// next to the input, if there is one.
fn planted_labels(explicit: Option<&Path>, input: &Path, n: usize) -> Result<Option<Vec<usize>>, CliError> {
    let labels = match explicit {
        Some(path) => {
            require_file(path)?;
            let text = fs::read_to_string(path)?;
            Some(labels_from_text(&text).ok_or_else(|| usage(format!("no labels found in {}", path.display())))?)
        }
        None => {
            let sidecar = sidecar_path(input);
            if sidecar.is_file() {
                labels_from_text(&fs::read_to_string(&sidecar)?)
            } else {
                None
            }
        }
    };
    match labels {
        Some(l) if l.len() != n => Err(usage(format!("expected {n} labels, found {}", l.len()))),
        other => Ok(other),
    }
}

fn score(labels: &[usize], truth: Option<&[usize]>) -> Result<Option<f64>, CliError> {
    Ok(match truth {
        Some(t) => Some(ari(labels, t)?),
        None => None,
    })
}

pub fn generate(a: &GenerateArgs) -> Result<(), CliError> {
    if a.er && a.q.is_some() {
        return Err(usage("--q applies to block networks only"));
    }
    let repeat = a.seed.repeat;
    for_each_seed(&a.seed, |seed| {
        let out = seeded_path(&a.out, seed, repeat);
        let (net, kind, spec) = if a.er {
            let spec = ErSpec::<f64>::new(a.n as usize, a.p.unwrap_or(0.5), seed);
            (generate_er_weighted(&spec)?, "erdos_renyi", serde_json::to_value(&spec)?)
        } else {
            let structure = a.structure.ok_or_else(|| usage("--structure or --er is required"))?;
            let noisy = a.p.is_some() || a.q.is_some();
            let mut spec = if noisy {
                BlockSpec::<f64>::noisy(structure, a.p.unwrap_or(1.0), a.q.unwrap_or(1.0), seed)
            } else {
                BlockSpec::<f64>::strict(structure, seed)
            };
            spec.k_groups = a.groups as usize;
            spec.group_size = a.size as usize;
            let net = if noisy {
                generate_noisy_block_network(&spec)?
            } else {
                generate_block_network(&spec)?
            };
            (net, if noisy { "noisy_block" } else { "block" }, serde_json::to_value(&spec)?)
        };
        ensure_parent(&out)?;
        save_network(&net, &out, a.format)?;
        let meta = json!({
            "command": "generate",
            "version": VERSION,
            "kind": kind,
            "n": net.n(),
            "format": format!("{:?}", a.format).to_lowercase(),
            "spec": spec,
            "planted_labels": net.planted_labels(),
            "rng": RngInfo::new(seed, Stage::Generate),
        });
        write_json(&sidecar_path(&out), &meta)?;
        Ok(out.display().to_string())
    })
}

struct Topology {
    barcode: Bars,
    features: Features,
    classification: Classification,
    max_dim: usize,
}

fn topology_of_filtration(f: &FlagFiltration, t: &TopologyArgs) -> Result<Topology, CliError> {
    let barcode = compute_persistence(f)?;
    let features = extract_features(&barcode, t.tau, t.zeta.recip())?;
    let classification = classify_structure(&features);
    Ok(Topology {
        barcode,
        features,
        classification,
        max_dim: f.max_dim(),
    })
}

fn topology_of_network(net: &Network, t: &TopologyArgs) -> Result<Topology, CliError> {
    let d = crvr_distance(net, t.zeta)?;
    let f = build_flag_filtration(&d, t.max_dim as usize)?;
    topology_of_filtration(&f, t)
}

/// Writes `barcode.csv`, `diagram.svg` and `features.json` into `dir` and
/// returns the features document.
fn write_topology(
    dir: &Path,
    topo: &Topology,
    t: &TopologyArgs,
    seed: Option<u64>,
    title: &str,
) -> Result<Value, CliError> {
    fs::create_dir_all(dir)?;
    let shown = if t.cap_as_infinite {
        topo.barcode.with_cap_as_infinite(t.zeta.recip())
    } else {
        topo.barcode.clone()
    };
    let bars = if t.keep_zero_length {
        shown.clone()
    } else {
        shown.without_zero_length()
    };
    let mut csv = BufWriter::new(File::create(dir.join("barcode.csv"))?);
    emit_diagram_csv(&bars, t.zeta, t.tau, seed, &mut csv)?;
    csv.flush()?;

    let svg = emit_diagram_svg(
        &shown,
        &SvgOptions {
            tau: Some(t.tau),
            title: Some(title.to_owned()),
            ..SvgOptions::default()
        },
    );
    fs::write(dir.join("diagram.svg"), svg)?;

    let doc = json!({
        "classifier_version": CLASSIFIER_VERSION,
        "classification": topo.classification,
        "features": topo.features,
        "zeta": t.zeta,
        "tau": t.tau,
        "cap": t.zeta.recip(),
        "max_dim": topo.max_dim,
        "cap_as_infinite": t.cap_as_infinite,
        "intervals": topo.barcode.len(),
        "zero_length_intervals": topo.barcode.len() - topo.barcode.without_zero_length().len(),
        "seed": seed,
    });
    write_json(&dir.join("features.json"), &doc)?;
    Ok(doc)
}

fn title_of(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let (topo, source) = match (&a.filtration_in, &a.input) {
        (Some(path), _) => {
            require_file(path)?;
            let f = FlagFiltration::load(path)?;
            (topology_of_filtration(&f, &a.topology)?, path)
        }
        (None, Some(path)) => {
            require_file(path)?;
            let net: Network = load_network(path, a.format)?;
            (topology_of_network(&net, &a.topology)?, path)
        }
        (None, None) => return Err(usage("--input or --filtration-in is required")),
    };
    write_topology(&a.out, &topo, &a.topology, a.seed, &title_of(source))?;
    println!("{} {:.3}", topo.classification.label, topo.classification.score);
    Ok(())
}

fn louvain_doc(net: &Network, seed: u64, truth: Option<&[usize]>) -> Result<Value, CliError> {
    let p = run_louvain(net, seed)?;
    Ok(json!({
        "communities": p.communities,
        "modularity": p.modularity,
        "labels": p.labels,
        "ari_vs_planted": score(&p.labels, truth)?,
        "rng": RngInfo::new(seed, Stage::Louvain),
    }))
}

pub fn louvain(a: &LouvainArgs) -> Result<(), CliError> {
    let net = load(&a.input)?;
    let truth = planted_labels(a.labels.as_deref(), &a.input.input, net.n())?;
    let repeat = a.seed.repeat;
    for_each_seed(&a.seed, |seed| {
        let doc = json!({
            "command": "louvain",
            "version": VERSION,
            "input": a.input.input.display().to_string(),
            "seed": seed,
            "partition": louvain_doc(&net, seed, truth.as_deref())?,
        });
        emit(a.out.as_deref(), seed, repeat, &doc)
    })
}

/// Writes to the (seeded) path and reports it, or returns the JSON itself
/// for stdout.
fn emit(out: Option<&Path>, seed: u64, repeat: u64, doc: &Value) -> Result<String, CliError> {
    match out {
        Some(path) => {
            let path = seeded_path(path, seed, repeat);
            write_json(&path, doc)?;
            Ok(path.display().to_string())
        }
        None => Ok(to_json(doc)?.trim_end().to_owned()),
    }
}

fn wsbm_config(w: &WsbmArgs, seed: u64) -> WsbmConfig {
    let mut c = WsbmConfig::with_k(w.k as usize, seed);
    c.alpha = w.alpha;
    c.restarts = w.restarts as usize;
    c.max_iter = w.max_iter as usize;
    c.tol = w.tol;
    c.floor = w.floor;
    c.warmup_steps = w.warmup_steps;
    c
}

fn wsbm_doc(net: &Network, w: &WsbmArgs, seed: u64, truth: Option<&[usize]>) -> Result<(Value, Vec<usize>), CliError> {
    let fit = fit_wsbm(net, &wsbm_config(w, seed))?;
    let mut doc = serde_json::to_value(fit.report())?;
    doc["ari_vs_planted"] = json!(score(&fit.labels, truth)?);
    Ok((doc, fit.labels))
}

pub fn wsbm(a: &WsbmCmdArgs) -> Result<(), CliError> {
    let net = load(&a.input)?;
    let truth = planted_labels(a.labels.as_deref(), &a.input.input, net.n())?;
    let repeat = a.seed.repeat;
    for_each_seed(&a.seed, |seed| {
        let (fit, _) = wsbm_doc(&net, &a.wsbm, seed, truth.as_deref())?;
        let doc = json!({
            "command": "wsbm",
            "version": VERSION,
            "input": a.input.input.display().to_string(),
            "seed": seed,
            "fit": fit,
        });
        emit(a.out.as_deref(), seed, repeat, &doc)
    })
}

pub fn compare(a: &CompareArgs) -> Result<(), CliError> {
    let net = load(&a.input)?;
    let truth = planted_labels(a.labels.as_deref(), &a.input.input, net.n())?;
    let topo = topology_of_network(&net, &a.topology)?;
    let repeat = a.seed.repeat;
    let title = title_of(&a.input.input);
    for_each_seed(&a.seed, |seed| {
        let dir = seeded_dir(&a.out, seed, repeat);
        let features = write_topology(&dir, &topo, &a.topology, Some(seed), &title)?;
        let louvain = louvain_doc(&net, seed, truth.as_deref())?;
        let (wsbm, wsbm_labels) = wsbm_doc(&net, &a.wsbm, seed, truth.as_deref())?;
        let louvain_labels: Vec<usize> = serde_json::from_value(louvain["labels"].clone())?;
        let report = json!({
            "command": "compare",
            "version": VERSION,
            "input": a.input.input.display().to_string(),
            "seed": seed,
            "n": net.n(),
            "planted_labels": truth,
            "topology": features,
            "louvain": louvain,
            "wsbm": wsbm,
            "louvain_vs_wsbm_ari": ari(&louvain_labels, &wsbm_labels)?,
        });
        write_json(&dir.join("report.json"), &report)?;
        Ok(format!(
            "{}: label {} ({:.3}), louvain {} communities Q={:.4}, wsbm F={:.3}",
            dir.display(),
            topo.classification.label,
            topo.classification.score,
            louvain["communities"],
            louvain["modularity"].as_f64().unwrap_or(f64::NAN),
            wsbm["free_energy"].as_f64().unwrap_or(f64::NAN),
        ))
    })
}
