use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spclust::{
    correlation_to_distance, euclidean_distances, ga_run, ga_run_ordered, generate_blobs,
    generate_circles, imn_denoise, log_returns, make_positive_definite, min_max_scale,
    minimum_spanning_tree, mutual_knn_graph, pairwise_overlap_correlation, pearson, rmt_denoise,
    similarity_from_distance, strength_matrix, temperature_sweep, write_matrix_csv, ChainParams,
    ClusterLabeling, CorrelationMatrix, CsvOptions, DataMatrix, DistanceMatrix, GaParams,
    GraphExport, ImnInput, MatrixEnvelope, Objective, StrengthGraph, Sweep, SweepConfig,
    ValidationReport,
};

use crate::args::*;
use crate::io::*;
use crate::Failure;

type Outcome = Result<(), Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Generate { kind } => generate(kind),
        Command::Preprocess(a) => preprocess(a),
        Command::Spc(a) => spc(a),
        Command::Fspc(a) => fspc(a),
        Command::Validate(a) => validate(a),
        Command::Analyze(a) => analyze(a),
        Command::Mst(a) => mst(a),
    }
}

fn csv_options(path: &Path, header: HeaderArg, row_labels: bool, transpose: bool) -> spclust::Result<CsvOptions> {
    let has_header = if header.header {
        true
    } else if header.no_header || has_extension(path, "json") {
        false
    } else {
        sniff_header(path, row_labels)?
    };
    Ok(CsvOptions { has_header, row_labels, transpose })
}

fn generate(kind: GenerateKind) -> Outcome {
    let ((data, labels), out, name) = match kind {
        GenerateKind::Circles { n, noise, seed, out } => {
            (generate_circles(n, noise, seed.seed)?, out, "circles")
        }
        GenerateKind::Blobs { n, dims, sigmas, seed, out } => {
            (generate_blobs(n, dims, &sigmas, seed.seed)?, out, "blobs")
        }
    };
    let output = out.output.unwrap_or_else(|| PathBuf::from(format!("{name}.csv")));
    let labels_path = match out.labels {
        Some(p) => p,
        None if is_stdio(&output) => {
            return Err(Failure::Usage("--labels is required when the data goes to stdout".into()))
        }
        None => {
            let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or(name);
            output.with_file_name(format!("{stem}_labels.csv"))
        }
    };
    write_data(&output, &data)?;
    write_labels(&labels_path, &labels)?;
    Ok(())
}

fn write_data(path: &Path, data: &DataMatrix) -> spclust::Result<()> {
    if has_extension(path, "json") {
        write_json(path, &MatrixEnvelope::from(data))
    } else {
        let mut w = create(path)?;
        write_matrix_csv(data, &mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn preprocess(a: PreprocessArgs) -> Outcome {
    let opts = csv_options(&a.input.input, a.input.header, a.input.row_labels, a.input.transpose)?;
    let mut data = match read_matrix_input(&a.input.input, opts)? {
        MatrixInput::Data(d) => d,
        MatrixInput::Correlation(_) => {
            return Err(Failure::Usage("preprocess expects data, not a correlation matrix".into()))
        }
    };
    if a.returns {
        data = log_returns(&data)?;
    }
    if a.scale {
        data = min_max_scale(&data);
    }
    let corr = match (a.correlation, a.denoise) {
        (None, Denoise::None) => {
            if a.make_pd {
                return Err(Failure::Usage("--make-pd needs --correlation or --denoise".into()));
            }
            write_data(&a.output, &data)?;
            return Ok(());
        }
        (Some(CorrelationChoice::Pearson), _) => pearson(&data)?,
        (Some(CorrelationChoice::Overlap), _) => pairwise_overlap_correlation(&data)?,
        (Some(CorrelationChoice::Similarity), _) => {
            similarity_from_distance(&euclidean_distances(&data)?)?.with_ids(data.row_ids.clone())
        }
        (None, Denoise::Imn) => {
            imn_denoise(ImnInput::Data(&data), a.imn_iters, a.imn_tol)?.with_ids(data.row_ids.clone())
        }
        (None, Denoise::Rmt) => rmt_denoise(&data, a.rmt_upper_only)?.with_ids(data.row_ids.clone()),
    };
    let corr = if a.make_pd { make_positive_definite(&corr) } else { corr };
    write_json(&a.output, &MatrixEnvelope::from(&corr))?;
    Ok(())
}

fn distances_for(input: MatrixInput, choice: DistanceChoice) -> spclust::Result<DistanceMatrix> {
    match input {
        MatrixInput::Correlation(c) => Ok(correlation_to_distance(&c)),
        MatrixInput::Data(d) => match choice {
            DistanceChoice::Euclidean => euclidean_distances(&d),
            DistanceChoice::Correlation => Ok(correlation_to_distance(&pearson(&d)?)),
        },
    }
}

fn spc(a: SpcArgs) -> Outcome {
    let opts = csv_options(&a.input, a.header, a.row_labels, a.transpose)?;
    let (export, strengths): (GraphExport, StrengthGraph) = match read_spc_input(&a.input, opts)? {
        SpcInput::Graph(g) => {
            let (graph, strengths) = g.into_graph()?;
            (GraphExport::new(&graph, &strengths), strengths)
        }
        SpcInput::Matrix(m) => {
            let dist = distances_for(m, a.distance)?;
            let graph = mutual_knn_graph(&dist, a.k)?;
            let strengths = strength_matrix(&graph);
            (GraphExport::new(&graph, &strengths), strengths)
        }
    };
    if let Some(path) = &a.graph_output {
        write_json(path, &export)?;
    }
    let config = SweepConfig {
        grid: a.grid,
        chain: ChainParams { m_steps: a.steps, burn_in: a.burn_in.unwrap_or(a.steps / 5), q: a.q, theta: a.theta },
        seed: a.seed.seed,
        keep_correlations: a.dump_g,
    };
    let sweep = temperature_sweep(&strengths, &config)?;
    write_json(&a.output, &sweep.to_file())?;
    Ok(())
}

/// Output of the `fspc` command.
#[derive(Debug, Serialize, Deserialize)]
pub struct FspcReport {
    pub objective: Objective,
    pub fitness: f64,
    pub n_clusters: usize,
    pub cluster_sizes: Vec<usize>,
    pub generations_run: usize,
    pub best_labels: ClusterLabeling,
    pub history: Vec<f64>,
}

fn fspc(a: FspcArgs) -> Outcome {
    let corr = read_correlation(&a.corr)?;
    let params = GaParams {
        pop_size: a.pop,
        max_generations: a.gens,
        stall_generations: a.stall,
        seed: a.seed.seed,
        objective: a.objective,
    };
    let result = if a.order_by_neighbors { ga_run_ordered(&corr, &params)? } else { ga_run(&corr, &params)? };
    write_json(
        &a.output,
        &FspcReport {
            objective: a.objective,
            fitness: result.fitness,
            n_clusters: result.best.n_clusters(),
            cluster_sizes: result.best.sorted_sizes(),
            generations_run: result.generations_run,
            best_labels: result.best,
            history: result.history,
        },
    )?;
    Ok(())
}

fn read_sweep(path: &Path) -> spclust::Result<Sweep> {
    Sweep::from_reader(open(path)?)
}

fn read_reference(path: &Path) -> spclust::Result<ClusterLabeling> {
    if has_extension(path, "json") {
        let report: FspcReport = serde_json::from_reader(open(path)?)?;
        Ok(report.best_labels)
    } else {
        read_labels(path)
    }
}

fn validate(a: ValidateArgs) -> Outcome {
    let sweep = read_sweep(&a.sweep)?;
    let corr: Option<CorrelationMatrix> = a.corr.as_deref().map(read_correlation).transpose()?;
    let reference = a.reference.as_deref().map(read_reference).transpose()?;
    let report = ValidationReport::build(&sweep, corr.as_ref(), reference.as_ref())?;
    write_json(&a.output, &report)?;
    if let Some(path) = &a.markdown {
        let mut w = create(path)?;
        w.write_all(report.to_markdown().as_bytes()).map_err(spclust::Error::from)?;
        w.flush().map_err(spclust::Error::from)?;
    }
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let curve = spclust::free_energy_curve(&read_sweep(&a.sweep)?)?;
    if has_extension(&a.output, "json") {
        write_json(&a.output, &curve)?;
    } else {
        spclust::thermo::write_curve_csv(&curve, create(&a.output)?)?;
    }
    Ok(())
}

fn mst(a: MstArgs) -> Outcome {
    let opts = csv_options(&a.input.input, a.input.header, a.input.row_labels, a.input.transpose)?;
    let (dist, names) = match read_matrix_input(&a.input.input, opts)? {
        MatrixInput::Data(d) => (euclidean_distances(&d)?, d.row_ids),
        MatrixInput::Correlation(c) => (correlation_to_distance(&c), c.ids),
    };
    let tree = minimum_spanning_tree(&dist);
    match a.format {
        MstFormat::Json => write_json(&a.output, &tree)?,
        MstFormat::Dot => {
            let mut w = create(&a.output)?;
            tree.write_dot(&mut w, Some(&names))?;
            w.flush().map_err(spclust::Error::from)?;
        }
    }
    Ok(())
}
