use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use fixedbitset::FixedBitSet;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use matchwidth_core::cnf::{build_phi_k, Cnf, ModelSet, SubsetMode};
use matchwidth_core::constructive::{mwmain_bound, mwmain_witness};
use matchwidth_core::graph::{build_gk_instance, gk_tree_decomposition, occupied_set};
use matchwidth_core::nrobp::{approximant, bottleneck_census, build_order_nrobp, models_through, Deletion};
use matchwidth_core::oracle::check_witnessing;
use matchwidth_core::scdt::{build_scdt, verify_manyvars1};
use matchwidth_core::width::{pmw_with_order, witnessing_matching_exact};
use matchwidth_core::{Error, Graph};

use crate::{sample, CalibrateCmd, Caps, CensusArgs, DeletionMode, Failed, GenerateArgs, PmwCmd, ScdtArgs};

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn f6(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

fn joined(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn generate(args: &GenerateArgs, caps: Caps, seed: u64) -> Result<()> {
    let inst = build_phi_k(args.instance.k, args.instance.height)?;
    let pg = &inst.graph;
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let mut files = vec![
        ("gk.graph", pg.graph().to_edge_list()),
        ("phi.cnf", inst.cnf.to_dimacs()),
        ("gk.td", gk_tree_decomposition(pg)?.to_td()),
    ];
    if args.nrobp {
        let phi = ModelSet::from_cnf(&inst.cnf, caps.cap_models)?;
        let f = match args.ratio {
            Some(r) => approximant(&phi, r, &Deletion::Uniform, &mut ChaCha8Rng::seed_from_u64(seed))?,
            None => phi,
        };
        let order: Vec<usize> = (0..inst.cnf.num_vars()).collect();
        files.push(("phi.nrobp", build_order_nrobp(&f, &order)?.to_text()));
    }
    let mut stdout = io::stdout().lock();
    for (name, text) in files {
        let path = args.out.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        writeln!(stdout, "wrote {name}")?;
    }
    Ok(())
}

pub fn census(args: &CensusArgs, caps: Caps, seed: u64) -> Result<()> {
    let (k, h) = (args.instance.k, args.instance.height);
    let inst = build_phi_k(k, h)?;
    let g = inst.graph.graph();
    let n = g.vertex_count();
    let order: Vec<usize> = (0..n).collect();
    let phi = ModelSet::from_cnf(&inst.cnf, caps.cap_models)?;
    let deletion = match args.deletion {
        DeletionMode::Uniform => Deletion::Uniform,
        DeletionMode::Concentrated => {
            let z = build_order_nrobp(&phi, &order)?;
            let c = bottleneck_census(&z, g, args.q, caps.cap_paths)?;
            let top = c
                .largest_tuple()
                .ok_or_else(|| Error::Internal { operation: "census", detail: "φ has no tuples".into() })?;
            Deletion::Concentrated(models_through(&z, &top.components, caps.cap_paths)?)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_n = (n as f64).log2();
    let mut failing = Vec::new();
    let mut rows = Vec::new();
    for &ratio in &args.ratio {
        let f = approximant(&phi, ratio, &deletion, &mut rng)?;
        let c = bottleneck_census(&build_order_nrobp(&f, &order)?, g, args.q, caps.cap_paths)?;
        let pass = c.passed() && c.f_size == f.len();
        if !pass {
            failing.push(ratio.to_string());
        }
        let largest = c.largest_tuple().map_or(0, |t| t.f_a);
        rows.push([
            k.to_string(),
            h.to_string(),
            n.to_string(),
            ratio.to_string(),
            format!("{:?}", args.deletion).to_lowercase(),
            phi.len().to_string(),
            f.len().to_string(),
            f6((phi.len() as f64 / f.len() as f64).log2()),
            c.paths.to_string(),
            c.q.to_string(),
            c.tuples.len().to_string(),
            c.mu.to_string(),
            f6(c.q as f64 * (c.mu as f64).log2()),
            c.max_multiplicity.to_string(),
            c.min_u.to_string(),
            c.max_union.to_string(),
            largest.to_string(),
            f6(k as f64 * log_n / c.min_u as f64),
            c.covering_identity.to_string(),
            c.containment_failures.to_string(),
            c.cover_failures.to_string(),
            c.tp_le_product.to_string(),
            c.tp_le_mu_q.to_string(),
            c.largest_share_bound.to_string(),
            pass.to_string(),
        ]);
    }
    let mut w = csv::Writer::from_writer(output(args.out.as_deref())?);
    w.write_record([
        "k", "height", "n", "ratio", "deletion", "phi_models", "f_models", "log2_phi_over_f", "paths", "q", "tuples",
        "mu", "q_log2_mu", "max_multiplicity", "min_u", "max_union", "largest_f_a", "klogn_over_min_u",
        "covering_identity", "containment_failures", "cover_failures", "tp_le_product", "tp_le_mu_q",
        "largest_share_bound", "pass",
    ])?;
    for r in &rows {
        w.write_record(r)?;
    }
    w.flush()?;
    if !failing.is_empty() {
        return Err(Failed(format!("census checks failed at ratios {}", failing.join(" "))).into());
    }
    Ok(())
}

fn vertex_set(g: &Graph, vs: &[usize]) -> Result<FixedBitSet> {
    let n = g.vertex_count();
    let mut v = FixedBitSet::with_capacity(n);
    for &x in vs {
        if x >= n {
            return Err(Error::InvalidInput(format!("vertex {x} out of range for {n} vertices")).into());
        }
        v.insert(x);
    }
    Ok(v)
}

pub fn pmw(cmd: &PmwCmd, caps: Caps) -> Result<()> {
    let mut out = io::stdout().lock();
    match cmd {
        PmwCmd::Exact { graph, vertices } => {
            let g = Graph::parse_edge_list(&read(graph)?)?;
            let all: Vec<usize> = (0..g.vertex_count()).collect();
            let v = vertex_set(&g, vertices.as_deref().unwrap_or(&all))?;
            let (k, order) = pmw_with_order(&g, &v, caps.cap_perms)?;
            writeln!(out, "pmw {k}")?;
            writeln!(out, "order {}", joined(&order))?;
        }
        PmwCmd::Witness { graph, order } => {
            let g = Graph::parse_edge_list(&read(graph)?)?;
            let v = vertex_set(&g, order)?;
            let w = witnessing_matching_exact(&g, &v, order)?;
            let in_v: Vec<bool> = (0..g.vertex_count()).map(|x| v.contains(x)).collect();
            check_witnessing(&g, &in_v, order, w.split, w.matching.pairs())
                .map_err(|e| Failed(format!("returned matching is not witnessing: {e}")))?;
            writeln!(out, "size {}", w.len())?;
            writeln!(out, "split {}", w.split)?;
            let edges: Vec<String> = w.matching.pairs().iter().map(|(a, b)| format!("{a}-{b}")).collect();
            writeln!(out, "matching {}", edges.join(" "))?;
        }
    }
    Ok(())
}

pub fn calibrate(cmd: &CalibrateCmd, caps: Caps, seed: u64) -> Result<()> {
    match cmd {
        CalibrateCmd::Mainptv { instance, trials, out } => mainptv(instance.k, instance.height, *trials, out.as_deref(), seed),
        CalibrateCmd::Manyvars1 {
            trials,
            max_vertices,
            max_degree,
            out,
        } => manyvars1(*trials, *max_vertices, *max_degree, out.as_deref(), caps, seed),
    }
}

fn mainptv(k: usize, h: u32, trials: usize, out: Option<&Path>, seed: u64) -> Result<()> {
    let pg = build_gk_instance(k, h)?;
    let n = pg.vertex_count();
    let p = k / 4;
    let klogn = k as f64 * (n as f64).log2();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = csv::Writer::from_writer(output(out)?);
    w.write_record([
        "trial", "k", "height", "n", "v_size", "occupied", "p", "full_occupancy", "split", "witness", "bound",
        "prefix_lower", "c2_emp", "c2_bound", "status",
    ])?;
    let mut failures = 0;
    for trial in 0..trials {
        let full = trial % 2 == 1;
        let v = if trial == 0 {
            let mut all = FixedBitSet::with_capacity(n);
            all.insert_range(..);
            all
        } else {
            sample::vertex_set(&pg, &mut rng, full)
        };
        let mut sv: Vec<usize> = v.ones().collect();
        sv.shuffle(&mut rng);
        let occ = occupied_set(&pg, &v).occupied.len();
        let bound = mwmain_bound(occ, p);
        let mut rec = vec![
            trial.to_string(),
            k.to_string(),
            h.to_string(),
            n.to_string(),
            sv.len().to_string(),
            occ.to_string(),
            p.to_string(),
            (trial == 0 || full).to_string(),
        ];
        match mwmain_witness(&pg, &v, &sv, p) {
            Ok(wm) => {
                let in_v: Vec<bool> = (0..n).map(|x| v.contains(x)).collect();
                let ok = wm.len() >= bound && check_witnessing(pg.graph(), &in_v, &sv, wm.split, wm.matching.pairs()).is_ok();
                failures += usize::from(!ok);
                let lower = wm.len().div_ceil(2);
                rec.extend([
                    wm.split.to_string(),
                    wm.len().to_string(),
                    bound.to_string(),
                    lower.to_string(),
                    f6(lower as f64 / klogn),
                    f6(bound.div_ceil(2) as f64 / klogn),
                    if ok { "pass" } else { "fail" }.to_string(),
                ]);
            }
            Err(Error::Precondition { .. }) => {
                rec.extend(["", "", &bound.to_string(), "", "", ""].map(String::from));
                rec.push("skipped".into());
            }
            Err(e) => return Err(e.into()),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    if failures > 0 {
        return Err(Failed(format!("{failures} trials below the constructive bound")).into());
    }
    Ok(())
}

fn manyvars1(trials: usize, max_vertices: usize, max_degree: usize, out: Option<&Path>, caps: Caps, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = csv::Writer::from_writer(output(out)?);
    w.write_record([
        "trial", "vertices", "edges", "max_degree", "u_size", "phi_models", "arrow_models", "b_d", "gap_bits",
        "slack_bits", "b_emp", "holds", "subset_independent", "subset_no_common_neighbours", "b_d_literal",
        "holds_literal",
    ])?;
    let mut failures = 0;
    for trial in 0..trials {
        let g = sample::bounded_graph(&mut rng, max_vertices, max_degree);
        let u: Vec<usize> = (0..g.vertex_count()).filter(|_| rng.gen_bool(0.5)).collect();
        let r = verify_manyvars1(&g, &u, caps.cap_models, SubsetMode::Independent)?;
        let alt = verify_manyvars1(&g, &u, caps.cap_models, SubsetMode::NoCommonNeighbors)?;
        failures += usize::from(!r.holds);
        let d = r.max_degree as f64;
        let c = 1.0 - 0.5f64.powf(2.0 * d + 1.0);
        let b_d = (d + 1.0) / (1.0 / c).log2();
        let ratio = |x: &num_bigint::BigUint| x.to_f64().unwrap_or(f64::INFINITY);
        let gap = (ratio(&r.phi_count) / ratio(&r.arrow_count)).log2();
        let size = r.u.len() as f64;
        w.write_record([
            trial.to_string(),
            r.vertices.to_string(),
            g.edge_count().to_string(),
            r.max_degree.to_string(),
            r.u.len().to_string(),
            r.phi_count.to_string(),
            r.arrow_count.to_string(),
            f6(b_d),
            f6(gap),
            f6(gap - size / b_d),
            if r.u.is_empty() { "0.000000".into() } else { f6(size / gap) },
            r.holds.to_string(),
            r.subset_bound_holds.to_string(),
            alt.subset_bound_holds.to_string(),
            // the reading with 2^b_d = (1/c_d)^(1/(d+1)), in floating point
            f6(1.0 / b_d),
            (gap >= size * b_d).to_string(),
        ])?;
    }
    w.flush()?;
    if failures > 0 {
        return Err(Failed(format!("{failures} trials violate the many-variables bound")).into());
    }
    Ok(())
}

pub fn scdt(args: &ScdtArgs) -> Result<()> {
    let f = Cnf::parse_dimacs(&read(&args.cnf)?)?;
    let order: Vec<usize> = args.order.clone().unwrap_or_else(|| (0..f.num_vars()).collect());
    let t = build_scdt(&f, &order)?;
    let mut out = output(args.out.as_deref())?;
    out.write_all(t.to_dump().as_bytes())?;
    out.flush()?;
    Ok(())
}
