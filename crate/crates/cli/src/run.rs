//! Executes a [`RunManifest`]. Fresh runs and replays share this path, which
//! is what makes replays reproduce their outputs exactly.

use std::fmt::Write as _;
use std::path::Path;

use netspectra::eigen::dense_cap;
use netspectra::empirical::{
    default_range, ensemble_hub, ensemble_leading, ensemble_spectra, sample_replicate, EmpiricalError, EnsembleStats,
    HubEnsemble,
};
use netspectra::manifest::{EnsembleParams, RunCommand, RunManifest, Sweep};
use netspectra::spectrum::{
    density_grid, hub_eigenvalues, leading_eigenvalue, leading_eigenvalue_approx, HubPrediction, SpectrumError,
};
use netspectra::{DegreeModel, EnsembleHistogram, MatrixKind};

use crate::svg::{Plot, Series};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<EmpiricalError> for CliError {
    fn from(e: EmpiricalError) -> Self {
        match e {
            EmpiricalError::Invalid(msg) => CliError::Usage(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

pub enum Outcome {
    Done,
    /// Outputs were written but the requested quantity does not exist.
    Absent(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// File names a run produces, primary output first.
fn output_names(run: &RunCommand, primary: &str) -> Vec<String> {
    let stem = primary.rsplit_once('.').map_or(primary, |(s, _)| s);
    let mut names = vec![primary.to_string()];
    match run {
        RunCommand::Density { svg: true, .. } | RunCommand::Hub { svg: true, .. } => names.push(format!("{stem}.svg")),
        RunCommand::Empirical { svg, eigenvalues, .. } => {
            if *eigenvalues {
                names.push(format!("{stem}.eigenvalues.csv"));
            }
            if *svg {
                names.push(format!("{stem}.svg"));
            }
        }
        _ => {}
    }
    names
}

struct Writer<'a> {
    dir: &'a Path,
    enabled: bool,
}

impl Writer<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        if !self.enabled {
            return Ok(());
        }
        if !self.dir.as_os_str().is_empty() {
            std::fs::create_dir_all(self.dir)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.dir.display())))?;
        }
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn execute(manifest: &RunManifest, dir: &Path, write: bool) -> Result<Outcome, CliError> {
    let model = manifest.model.build().map_err(|e| usage(format!("model: {e}")))?;
    let mut manifest = manifest.clone();
    manifest.outputs = output_names(&manifest.run, &manifest.outputs[0]);
    let out = Writer { dir, enabled: write };
    let names = &manifest.outputs;
    let seed = manifest.base_seed;

    let outcome = match &manifest.run {
        RunCommand::Density { zmin, zmax, points, eta, svg } => {
            if *points < 2 {
                return Err(usage(format!("--points must be at least 2, got {points}")));
            }
            if !(zmin.is_finite() && zmax.is_finite() && zmin < zmax) {
                return Err(usage(format!("need finite --zmin < --zmax, got {zmin} and {zmax}")));
            }
            if eta.is_some_and(|e| !(e > 0.0 && e.is_finite())) {
                return Err(usage("--eta must be positive"));
            }
            let curve = density_grid(&model, *zmin, *zmax, *points, *eta)?;
            println!("points        {}", curve.z.len());
            println!("eta           {:e}", curve.eta);
            println!("norm_defect   {:e}", curve.norm_defect);
            println!("second_moment {}", curve.second_moment);
            if let Some((lo, hi)) = curve.band {
                println!("band          [{lo}, {hi}]");
            }
            out.write(&names[0], &curve.to_csv())?;
            if *svg {
                let pts = curve.z.iter().copied().zip(curve.rho.iter().copied()).collect();
                let plot = Plot::new("spectral density", "z", "rho").with(Series::line(pts, "#1f77b4"));
                out.write(&names[1], &plot.render())?;
            }
            Outcome::Done
        }
        RunCommand::Empirical { n, replicates, bins, kind, range, eigenvalues, svg } => {
            check_ensemble(*n, *replicates)?;
            if *bins == 0 {
                return Err(usage("--bins must be at least 1"));
            }
            let range = match range {
                Some([lo, hi]) => (*lo, *hi),
                None => default_range(&model)?,
            };
            EnsembleHistogram::from_values(&[], *bins, range)?;
            let spectra = ensemble_spectra(&model, *n, *replicates, seed, *kind)?;
            let pooled: Vec<f64> = spectra.iter().flatten().copied().collect();
            let mut hist = EnsembleHistogram::from_values(&pooled, *bins, range)?;
            hist.replicates = *replicates;
            hist.n = *n;
            hist.base_seed = seed;
            println!("replicates    {replicates} (n = {n}, {kind})");
            println!("range         [{}, {}], {} bins", range.0, range.1, bins);
            println!("dropped       {}", hist.dropped);
            match hist.l1_distance(&model, 16) {
                Ok(l1) => println!("l1_distance   {l1}"),
                Err(e) => println!("l1_distance   unavailable ({e})"),
            }
            out.write(&names[0], &hist.to_csv())?;
            let mut next = 1;
            if *eigenvalues {
                let mut dump = String::from("eigenvalue\n");
                for v in &pooled {
                    writeln!(dump, "{v}").expect("string write");
                }
                out.write(&names[next], &dump)?;
                next += 1;
            }
            if *svg {
                let mut steps = Vec::with_capacity(2 * hist.bins());
                for (b, d) in hist.density.iter().enumerate() {
                    steps.push((hist.bin_edges[b], *d));
                    steps.push((hist.bin_edges[b + 1], *d));
                }
                let mut plot = Plot::new("eigenvalue density", "z", "rho").with(Series::line(steps, "#999999"));
                if let Ok(curve) = density_grid(&model, range.0, range.1, hist.bins() * 8 + 1, None) {
                    let pts = curve.z.iter().copied().zip(curve.rho.iter().copied()).collect();
                    plot = plot.with(Series::line(pts, "#d62728"));
                }
                out.write(&names[next], &plot.render())?;
            }
            Outcome::Done
        }
        RunCommand::Leading { empirical } => {
            if let Some(p) = empirical {
                check_ensemble(p.n, p.replicates)?;
            }
            let approx = leading_eigenvalue_approx(&model);
            let (exact, absent) = match leading_eigenvalue(&model) {
                Ok(z) => (Some(z), None),
                Err(e @ SpectrumError::NoLeadingRoot { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            let ensemble = match empirical {
                Some(p) => Some(ensemble_leading(&model, p.n, p.replicates, seed, MatrixKind::Adjacency, &[])?),
                None => None,
            };
            println!("{:<10} {:>14} {:>12}", "method", "value", "stderr");
            match exact {
                Some(z) => println!("{:<10} {:>14.6} {:>12}", "exact", z, ""),
                None => println!("{:<10} {:>14} {:>12}", "exact", "none", ""),
            }
            println!("{:<10} {:>14.6} {:>12}", "approx", approx, "");
            let mut csv = String::from("method,value,stderr\n");
            writeln!(csv, "exact,{},", exact.map_or("none".to_string(), |z| z.to_string())).expect("string write");
            writeln!(csv, "approx,{approx},").expect("string write");
            if let (Some(s), Some(p)) = (&ensemble, empirical) {
                println!(
                    "{:<10} {:>14.6} {:>12.6}  (n = {}, {} replicates)",
                    "ensemble", s.mean, s.stderr, p.n, p.replicates
                );
                if let Some(z) = exact {
                    let band = 3.0 * s.stderr;
                    let inside = (s.mean - z).abs() <= band;
                    println!(
                        "exact value {} the ensemble band mean ± 3·stderr = [{:.6}, {:.6}]",
                        if inside { "lies within" } else { "lies outside" },
                        s.mean - band,
                        s.mean + band
                    );
                }
                writeln!(csv, "ensemble,{},{}", s.mean, s.stderr).expect("string write");
            }
            out.write(&names[0], &csv)?;
            match absent {
                Some(msg) => Outcome::Absent(msg),
                None => Outcome::Done,
            }
        }
        RunCommand::Hub { kn, sweep, empirical, svg } => {
            if let Some(p) = empirical {
                check_ensemble(p.n, p.replicates)?;
            }
            match (kn, sweep) {
                (Some(k), None) => hub_single(&model, *k, empirical.as_ref(), seed, &out, names)?,
                (None, Some(s)) => hub_sweep(&model, s, empirical.as_ref(), seed, &out, names, *svg)?,
                _ => return Err(usage("exactly one of --kn and --sweep is required")),
            }
        }
        RunCommand::Sample { n, hubs } => {
            if *n < 2 {
                return Err(usage(format!("--n must be at least 2, got {n}")));
            }
            let net = sample_replicate(&model, *n, seed, 0, hubs)?;
            println!("vertices      {}", net.n());
            println!("edge pairs    {}", net.edges().len());
            println!("two_m         {}", net.two_m_expected());
            out.write(&names[0], &net.edge_list().to_text())?;
            Outcome::Done
        }
    };
    out.write(&manifest.file_name(), &manifest.to_json())?;
    Ok(outcome)
}

fn check_ensemble(n: usize, replicates: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(usage(format!("--n must be at least 2, got {n}")));
    }
    if replicates == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    let cap = dense_cap();
    if n > cap {
        return Err(usage(format!("--n {n} exceeds the dense cap {cap} (set NETSPECTRA_DENSE_CAP)")));
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn hub_single(
    model: &DegreeModel,
    k_n: f64,
    empirical: Option<&EnsembleParams>,
    seed: u64,
    out: &Writer<'_>,
    names: &[String],
) -> Result<Outcome, CliError> {
    let pred: HubPrediction = hub_eigenvalues(model, k_n)?;
    println!("k_n                  {k_n}");
    println!("k_critical           {}", pred.k_critical);
    println!("band_edge            {}", pred.band_edge);
    match (pred.z_plus, pred.z_minus) {
        (Some(p), Some(m)) => {
            println!("z_plus               {p}");
            println!("z_minus              {m}");
            println!("vn_sq                {}", pred.vn_sq.unwrap_or(f64::NAN));
            println!("neighbor_vi_sq_mean  {}", pred.neighbor_vi_sq_mean.unwrap_or(f64::NAN));
        }
        _ => println!("z_plus               inside band"),
    }
    let mut header = String::from("k_n,k_critical,band_edge,exists,z_plus,z_minus,vn_sq,neighbor_vi_sq_mean");
    let mut row = format!(
        "{},{},{},{},{},{},{},{}",
        k_n,
        pred.k_critical,
        pred.band_edge,
        pred.exists,
        opt(pred.z_plus),
        opt(pred.z_minus),
        opt(pred.vn_sq),
        opt(pred.neighbor_vi_sq_mean)
    );
    if let Some(p) = empirical {
        let e: HubEnsemble = ensemble_hub(model, p.n, p.replicates, seed, k_n)?;
        let show = |label: &str, s: &EnsembleStats| println!("{label:<20} {} ± {}", s.mean, s.stderr);
        println!("-- sampled (n = {}, {} replicates)", p.n, p.replicates);
        show("top eigenvalue", &e.eigenvalue);
        show("vn_sq", &e.vn_sq);
        show("neighbor_mean_sq", &e.neighbor_mean_sq);
        show("bulk_mean_sq", &e.bulk_mean_sq);
        header.push_str(
            ",empirical_top,empirical_top_stderr,empirical_vn_sq,empirical_neighbor_mean_sq,empirical_bulk_mean_sq",
        );
        write!(
            row,
            ",{},{},{},{},{}",
            e.eigenvalue.mean, e.eigenvalue.stderr, e.vn_sq.mean, e.neighbor_mean_sq.mean, e.bulk_mean_sq.mean
        )
        .expect("string write");
    }
    out.write(&names[0], &format!("{header}\n{row}\n"))?;
    Ok(if pred.exists {
        Outcome::Done
    } else {
        Outcome::Absent(format!("no eigenvalue detaches: k_n = {k_n} is below k_critical = {}", pred.k_critical))
    })
}

fn hub_sweep(
    model: &DegreeModel,
    sweep: &Sweep,
    empirical: Option<&EnsembleParams>,
    seed: u64,
    out: &Writer<'_>,
    names: &[String],
    svg: bool,
) -> Result<Outcome, CliError> {
    if sweep.steps == 0 || !(sweep.lo.is_finite() && sweep.hi.is_finite() && sweep.lo <= sweep.hi) {
        return Err(usage("--sweep needs lo <= hi and at least one step"));
    }
    let mut csv = String::from("k_n,z_plus,band_edge,exists");
    if empirical.is_some() {
        csv.push_str(",empirical_mean,empirical_stderr");
    }
    csv.push('\n');
    let (mut predicted, mut sampled) = (Vec::new(), Vec::new());
    for k in sweep.values() {
        let pred = hub_eigenvalues(model, k)?;
        // Below the transition the top of the spectrum is the band edge.
        let top = pred.z_plus.unwrap_or(pred.band_edge);
        write!(csv, "{k},{top},{},{}", pred.band_edge, pred.exists).expect("string write");
        predicted.push((k, top));
        if let Some(p) = empirical {
            let s = ensemble_leading(model, p.n, p.replicates, seed, MatrixKind::Modularity, &[k])?;
            write!(csv, ",{},{}", s.mean, s.stderr).expect("string write");
            sampled.push((k, s.mean));
        }
        csv.push('\n');
    }
    if out.enabled {
        out.write(&names[0], &csv)?;
    } else {
        print!("{csv}");
    }
    if svg {
        let mut plot = Plot::new("leading modularity eigenvalue", "k_n", "z").with(Series::line(predicted, "#1f77b4"));
        if !sampled.is_empty() {
            plot = plot.with(Series::points(sampled, "#d62728"));
        }
        out.write(&names[1], &plot.render())?;
    }
    Ok(Outcome::Done)
}
