//! Command-line pipeline over the library: ingest labeled strings, embed
//! them into L1 characteristic vectors, project to dense features,
//! evaluate kernel approximation quality, and train/score a linear model.
//!
//! Results land in files; progress and summary statistics print to
//! stdout as stable `key=value` lines. Exit codes: 0 success, 2 bad
//! input, 3 contract violation.

mod alloc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use std::fs::{File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;
use strkern::classify::{self, LinearModel};
use strkern::dataset::{self, InputFormat};
use strkern::esp::LabelDictionary;
use strkern::features::CharacteristicVector;
use strkern::kernel::{self, GramSource};
use strkern::sfm::{self, ProjectionMode, RffVector};
use strkern::{cgk, io, seed, Error, Result};

#[global_allocator]
static ALLOC: alloc::Counting = alloc::Counting;

// ============================================================================
// Argument surface
// ============================================================================

#[derive(Parser)]
#[command(
    name = "strkern",
    about = "Approximate string alignment kernels with compact random feature maps",
    version
)]
struct Cli {
    /// Worker threads for the data-parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmbedMethod {
    Esp,
    Cgk,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProjectMode {
    Sfm,
    Fm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GramMode {
    Exact,
    Sfm,
    Fm,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a labeled corpus into sparse characteristic vectors.
    Embed {
        /// Corpus file.
        #[arg(long)]
        input: PathBuf,
        /// Corpus layout.
        #[arg(long, value_enum, default_value = "tsv")]
        format: CliFormat,
        /// Embedding: parse trees (esp) or the seeded random walk (cgk).
        #[arg(long, value_enum)]
        method: EmbedMethod,
        /// Sparse feature file to write.
        #[arg(long)]
        output: PathBuf,
        /// Reuse a saved parse dictionary so indices align across corpora
        /// (esp only). New structures still extend it.
        #[arg(long)]
        dict_in: Option<PathBuf>,
        /// Where to persist the parse dictionary (esp only).
        #[arg(long)]
        dict_out: Option<PathBuf>,
        /// Reuse saved walk parameters: same seed, length, and alphabet
        /// (cgk only).
        #[arg(long)]
        params_in: Option<PathBuf>,
        /// Where to persist the walk parameters (cgk only).
        #[arg(long)]
        params_out: Option<PathBuf>,
        /// Walk output length (cgk only; default 3 x longest string).
        #[arg(long)]
        cgk_len: Option<usize>,
        /// Walk seed (cgk only; default derived from --seed).
        #[arg(long)]
        cgk_seed: Option<u64>,
        /// Master seed; drawn from entropy and logged when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Project sparse vectors into dense features of dimension D.
    Project {
        /// Sparse feature file from `embed`.
        #[arg(long)]
        features: PathBuf,
        /// Output dimension D (even).
        #[arg(long)]
        dim: usize,
        /// Kernel bandwidth (default 1; fixed by the file with --seeds-in).
        #[arg(long)]
        beta: Option<f64>,
        /// Projector: hashed directions (sfm) or a stored matrix (fm).
        #[arg(long, value_enum, default_value = "sfm")]
        mode: ProjectMode,
        /// Dense feature file to write.
        #[arg(long)]
        output: PathBuf,
        /// Dictionary whose size fixes the input capacity d, so several
        /// feature files can share one projector.
        #[arg(long)]
        dict: Option<PathBuf>,
        /// Reuse saved projector seeds instead of generating (sfm only).
        #[arg(long)]
        seeds_in: Option<PathBuf>,
        /// Where to persist the projector seeds (sfm only).
        #[arg(long)]
        seeds_out: Option<PathBuf>,
        /// Master seed; drawn from entropy and logged when omitted.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a Gram matrix, exact or from dense features.
    Gram {
        #[arg(long, value_enum)]
        mode: GramMode,
        /// Sparse feature file (mode exact).
        #[arg(long)]
        features: Option<PathBuf>,
        /// Dense feature file (modes sfm, fm).
        #[arg(long)]
        rff: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Average |exact kernel - feature inner product| over all pairs.
    EvalError {
        /// Sparse feature file defining the exact kernel.
        #[arg(long)]
        features: PathBuf,
        /// Dense feature file(s); repeat the flag to average over seeds.
        #[arg(long, required = true)]
        rff: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Method column for the CSV report.
        #[arg(long, default_value = "sfm")]
        method_label: String,
        /// CSV file to append to (header written when new).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Empirical tail probabilities against the 2/(eps^2 D) bound.
    Concentration {
        /// Sparse feature file.
        #[arg(long)]
        features: PathBuf,
        /// Index of the first vector.
        #[arg(long, default_value_t = 0)]
        i: usize,
        /// Index of the second vector.
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Output dimensions to test.
        #[arg(long, value_delimiter = ',', default_values_t = [128usize, 512])]
        dims: Vec<usize>,
        /// Deviation thresholds to test.
        #[arg(long, value_delimiter = ',', default_values_t = [0.05f64, 0.1, 0.2])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV file to append to (header written when new).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit the linear model on dense features.
    Train {
        /// Dense feature file with labels.
        #[arg(long)]
        rff: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Model file to write.
        #[arg(long)]
        model_out: PathBuf,
    },
    /// Grid-search (beta, C) by k-fold cross-validation.
    Cv {
        /// Sparse feature file with labels.
        #[arg(long)]
        features: PathBuf,
        /// Output dimension D for the projections.
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value = "sfm")]
        mode: ProjectMode,
        #[arg(long, default_value_t = 3)]
        folds: usize,
        /// Bandwidth grid.
        #[arg(long, value_delimiter = ',', default_values_t = classify::DEFAULT_BETA_GRID)]
        betas: Vec<f64>,
        /// Regularization grid.
        #[arg(long, value_delimiter = ',', default_values_t = classify::DEFAULT_C_GRID)]
        cs: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score dense features with a saved model.
    Predict {
        /// Dense feature file with labels.
        #[arg(long)]
        rff: PathBuf,
        /// Model file from `train`.
        #[arg(long)]
        model: PathBuf,
        /// Where to write one decision value per line.
        #[arg(long)]
        scores_out: Option<PathBuf>,
    },
    /// Exact edit distance with substring moves (brute force, tiny inputs).
    EdmOracle {
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        /// Search alphabet (default: characters of the inputs).
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 16)]
        max_depth: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Tsv,
    Fasta,
}

impl From<CliFormat> for InputFormat {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Tsv => InputFormat::Tsv,
            CliFormat::Fasta => InputFormat::Fasta,
        }
    }
}

impl From<ProjectMode> for ProjectionMode {
    fn from(m: ProjectMode) -> Self {
        match m {
            ProjectMode::Sfm => ProjectionMode::Sfm,
            ProjectMode::Fm => ProjectionMode::Fm,
        }
    }
}

// ============================================================================
// Entry point and helpers
// ============================================================================

fn main() {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool configured twice");
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) {
    if threads.is_some() {
        eprintln!("note: built without the parallel feature; --threads has no effect");
    }
}

/// Use the given master seed or draw one; either way the run is
/// reproducible from the logged value.
fn master_seed(given: Option<u64>) -> u64 {
    let s = given.unwrap_or_else(|| rand::rng().random());
    println!("seed={s}");
    s
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

fn read_sparse_file(path: &Path) -> Result<(Vec<CharacteristicVector>, Vec<u8>)> {
    io::read_sparse(&mut open(path)?)
}

fn read_dense_file(path: &Path) -> Result<(Vec<RffVector>, Vec<u8>)> {
    io::read_dense(&mut open(path)?)
}

/// Open a CSV for appending, writing `header` first when the file is new
/// or empty.
fn append_csv(path: &Path, header: &str) -> Result<File> {
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{header}")?;
    }
    Ok(f)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Embed {
            input,
            format,
            method,
            output,
            dict_in,
            dict_out,
            params_in,
            params_out,
            cgk_len,
            cgk_seed,
            seed,
        } => cmd_embed(
            &input,
            format,
            method,
            &output,
            EmbedReuse {
                dict_in,
                dict_out,
                params_in,
                params_out,
            },
            cgk_len,
            cgk_seed,
            seed,
        ),
        Command::Project {
            features,
            dim,
            beta,
            mode,
            output,
            dict,
            seeds_in,
            seeds_out,
            seed,
        } => cmd_project(&features, dim, beta, mode, &output, dict, seeds_in, seeds_out, seed),
        Command::Gram {
            mode,
            features,
            rff,
            beta,
            output,
        } => cmd_gram(mode, features, rff, beta, &output),
        Command::EvalError {
            features,
            rff,
            beta,
            method_label,
            output,
        } => cmd_eval_error(&features, &rff, beta, &method_label, output),
        Command::Concentration {
            features,
            i,
            j,
            beta,
            dims,
            eps,
            trials,
            seed,
            output,
        } => cmd_concentration(&features, i, j, beta, &dims, &eps, trials, seed, output),
        Command::Train {
            rff,
            c,
            epochs,
            seed,
            model_out,
        } => cmd_train(&rff, c, epochs, seed, &model_out),
        Command::Cv {
            features,
            dim,
            mode,
            folds,
            betas,
            cs,
            epochs,
            seed,
        } => cmd_cv(&features, dim, mode, folds, &betas, &cs, epochs, seed),
        Command::Predict {
            rff,
            model,
            scores_out,
        } => cmd_predict(&rff, &model, scores_out),
        Command::EdmOracle {
            s1,
            s2,
            alphabet,
            max_len,
            max_depth,
        } => cmd_edm_oracle(&s1, &s2, alphabet, max_len, max_depth),
    }
}

// ============================================================================
// Subcommands
// ============================================================================

/// File-reuse flags for `embed`: load and/or persist the structures that
/// make feature indices comparable across corpora.
struct EmbedReuse {
    dict_in: Option<PathBuf>,
    dict_out: Option<PathBuf>,
    params_in: Option<PathBuf>,
    params_out: Option<PathBuf>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_embed(
    input: &Path,
    format: CliFormat,
    method: EmbedMethod,
    output: &Path,
    reuse: EmbedReuse,
    cgk_len: Option<usize>,
    cgk_seed: Option<u64>,
    seed_flag: Option<u64>,
) -> Result<()> {
    if method == EmbedMethod::Esp {
        for (flag, name) in [
            (reuse.params_in.is_some(), "--params-in"),
            (reuse.params_out.is_some(), "--params-out"),
            (cgk_len.is_some(), "--cgk-len"),
            (cgk_seed.is_some(), "--cgk-seed"),
        ] {
            if flag {
                return Err(Error::InvalidArgument(format!(
                    "{name} is only meaningful with --method cgk"
                )));
            }
        }
    } else {
        for (flag, name) in [
            (reuse.dict_in.is_some(), "--dict-in"),
            (reuse.dict_out.is_some(), "--dict-out"),
        ] {
            if flag {
                return Err(Error::InvalidArgument(format!(
                    "{name} is only meaningful with --method esp"
                )));
            }
        }
        if reuse.params_in.is_some() && (cgk_len.is_some() || cgk_seed.is_some()) {
            return Err(Error::InvalidArgument(
                "--params-in already fixes the walk; drop --cgk-len/--cgk-seed".into(),
            ));
        }
    }

    let ds = dataset::ingest(input, format.into())?;
    let avg_len: f64 = ds
        .records()
        .iter()
        .map(|r| r.payload.len() as f64)
        .sum::<f64>()
        / ds.len() as f64;
    println!(
        "records={} positives={} alphabet_size={} max_len={} avg_len={avg_len}",
        ds.len(),
        ds.positives(),
        ds.alphabet().len(),
        ds.max_len()
    );

    let start = Instant::now();
    let labels = ds.labels();
    let (vectors, d) = match method {
        EmbedMethod::Esp => {
            let mut dict = match &reuse.dict_in {
                Some(path) => io::read_dictionary(&mut open(path)?)?,
                None => LabelDictionary::new(ds.alphabet().iter().copied()),
            };
            let vectors = strkern::esp::embed_corpus(&ds.payloads(), &mut dict)?;
            if let Some(path) = reuse.dict_out {
                io::write_dictionary(&mut create(&path)?, &dict)?;
            }
            let d = dict.len();
            (vectors, d)
        }
        EmbedMethod::Cgk => {
            let params = match &reuse.params_in {
                Some(path) => io::read_cgk_params(&mut open(path)?)?,
                None => io::CgkParams {
                    seed: cgk_seed.unwrap_or_else(|| {
                        let master = master_seed(seed_flag);
                        seed::derive(master, "walk")
                    }),
                    l_out: cgk_len.unwrap_or(3 * ds.max_len()),
                    alphabet: ds.alphabet().to_vec(),
                },
            };
            let rnd = cgk::CgkRandomness::from_seed(params.seed);
            let vectors =
                cgk::cgk_embed_corpus(&ds.payloads(), &rnd, params.l_out, &params.alphabet)?;
            if let Some(path) = reuse.params_out {
                io::write_cgk_params(&mut create(&path)?, &params)?;
            }
            let d = params.l_out * (params.alphabet.len() + 1);
            (vectors, d)
        }
    };
    let nnz_total: usize = vectors.iter().map(|v| v.nnz()).sum();
    io::write_sparse(&mut create(output)?, &vectors, &labels)?;
    println!(
        "method={} d={d} nnz_total={nnz_total} elapsed_ms={}",
        match method {
            EmbedMethod::Esp => "esp",
            EmbedMethod::Cgk => "cgk",
        },
        start.elapsed().as_millis()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_project(
    features: &Path,
    dim: usize,
    beta_flag: Option<f64>,
    mode: ProjectMode,
    output: &Path,
    dict: Option<PathBuf>,
    seeds_in: Option<PathBuf>,
    seeds_out: Option<PathBuf>,
    seed_flag: Option<u64>,
) -> Result<()> {
    if mode == ProjectMode::Fm && (seeds_in.is_some() || seeds_out.is_some()) {
        return Err(Error::InvalidArgument(
            "--seeds-in/--seeds-out are only meaningful with --mode sfm; the dense \
             matrix is not persisted"
                .into(),
        ));
    }
    if dim < 2 || dim % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "--dim {dim} must be even and at least 2"
        )));
    }
    if seeds_in.is_some() && (seed_flag.is_some() || dict.is_some()) {
        return Err(Error::InvalidArgument(
            "--seeds-in fixes the projector; drop --seed and --dict".into(),
        ));
    }

    let (vectors, labels) = read_sparse_file(features)?;
    let file_d = vectors.first().map(|v| v.dim()).unwrap_or(0) as usize;
    // Capacity: an explicit dictionary wins so that several corpora can
    // share one projector; otherwise the file's own dimension.
    let fresh_d = match &dict {
        Some(path) => io::read_dictionary(&mut open(path)?)?.len(),
        None => file_d,
    };
    if fresh_d < file_d {
        return Err(Error::InvalidArgument(format!(
            "capacity {fresh_d} is smaller than the feature dimension {file_d}"
        )));
    }

    // The reported auxiliary memory covers exactly the projector state:
    // O(d) words for hashed directions, O(d*D) for the stored matrix.
    let start = Instant::now();
    let (zs, d, beta) = match mode {
        ProjectMode::Sfm => {
            let (seeds, aux) = match &seeds_in {
                Some(path) => {
                    let mut r = open(path)?;
                    alloc::measure(move || io::read_seeds(&mut r))
                }
                None => {
                    let beta = beta_flag.unwrap_or(1.0);
                    let proj_seed = seed::derive(master_seed(seed_flag), "projector");
                    alloc::measure(move || sfm::HashSeeds::generate(fresh_d, beta, proj_seed))
                }
            };
            let seeds = seeds?;
            if seeds.d() < file_d {
                return Err(Error::InvalidArgument(format!(
                    "stored projector capacity {} is smaller than the feature \
                     dimension {file_d}",
                    seeds.d()
                )));
            }
            if let Some(b) = beta_flag {
                if seeds_in.is_some() && b != seeds.beta() {
                    return Err(Error::InvalidArgument(format!(
                        "--beta {b} contradicts the stored bandwidth {}",
                        seeds.beta()
                    )));
                }
            }
            println!(
                "aux_mem_bytes={aux} projector_bytes={}",
                seeds.storage_bytes()
            );
            if let Some(path) = seeds_out {
                io::write_seeds(&mut create(&path)?, &seeds)?;
            }
            let (d, beta) = (seeds.d(), seeds.beta());
            (sfm::project_corpus(&vectors, dim, &seeds)?, d, beta)
        }
        ProjectMode::Fm => {
            let beta = beta_flag.unwrap_or(1.0);
            let proj_seed = seed::derive(master_seed(seed_flag), "projector");
            let (proj, aux) =
                alloc::measure(move || sfm::sample_dense_projection(fresh_d, dim, beta, proj_seed));
            let proj = proj?;
            println!(
                "aux_mem_bytes={aux} projector_bytes={}",
                proj.storage_bytes()
            );
            (sfm::project_corpus_fm(&vectors, &proj)?, fresh_d, beta)
        }
    };
    io::write_dense(&mut create(output)?, &zs, &labels)?;
    println!(
        "n={} d={d} dim={dim} beta={beta} mode={} elapsed_ms={}",
        zs.len(),
        match mode {
            ProjectMode::Sfm => "sfm",
            ProjectMode::Fm => "fm",
        },
        start.elapsed().as_millis()
    );
    Ok(())
}

fn cmd_gram(
    mode: GramMode,
    features: Option<PathBuf>,
    rff: Option<PathBuf>,
    beta: f64,
    output: &Path,
) -> Result<()> {
    let start = Instant::now();
    let gram = match mode {
        GramMode::Exact => {
            let path = features.ok_or_else(|| {
                Error::InvalidArgument("--mode exact needs --features".into())
            })?;
            let (vectors, _) = read_sparse_file(&path)?;
            kernel::exact_gram(&vectors, beta)?
        }
        GramMode::Sfm | GramMode::Fm => {
            let path = rff.ok_or_else(|| {
                Error::InvalidArgument("--mode sfm/fm needs --rff".into())
            })?;
            let (zs, _) = read_dense_file(&path)?;
            let source = if mode == GramMode::Sfm {
                GramSource::Sfm
            } else {
                GramSource::Fm
            };
            kernel::rff_gram(&zs, beta, source)?
        }
    };
    io::write_gram(&mut create(output)?, &gram)?;
    println!(
        "n={} source={} beta={beta} elapsed_ms={}",
        gram.n(),
        gram.source().as_str(),
        start.elapsed().as_millis()
    );
    Ok(())
}

fn cmd_eval_error(
    features: &Path,
    rff: &[PathBuf],
    beta: f64,
    method_label: &str,
    output: Option<PathBuf>,
) -> Result<()> {
    let (vectors, _) = read_sparse_file(features)?;
    let gram = kernel::exact_gram(&vectors, beta)?;
    let mut errs = Vec::with_capacity(rff.len());
    let mut dim = 0;
    for path in rff {
        let (zs, _) = read_dense_file(path)?;
        dim = zs.first().map(|z| z.dim()).unwrap_or(0);
        errs.push(kernel::average_error(&gram, &zs)?);
    }
    let (mean, std) = kernel::error_stats(&errs);
    println!(
        "method={method_label} D={dim} beta={beta} files={} mean_error={mean} std_error={std}",
        rff.len()
    );
    if let Some(path) = output {
        let mut f = append_csv(&path, io::ERROR_CSV_HEADER)?;
        io::write_error_csv_row(&mut f, method_label, dim, beta, mean, std)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_concentration(
    features: &Path,
    i: usize,
    j: usize,
    beta: f64,
    dims: &[usize],
    eps: &[f64],
    trials: usize,
    seed_flag: Option<u64>,
    output: Option<PathBuf>,
) -> Result<()> {
    let master = master_seed(seed_flag);
    let (vectors, _) = read_sparse_file(features)?;
    for idx in [i, j] {
        if idx >= vectors.len() {
            return Err(Error::InvalidArgument(format!(
                "vector index {idx} out of range for {} records",
                vectors.len()
            )));
        }
    }
    let start = Instant::now();
    let rows = kernel::concentration_report(
        &vectors[i],
        &vectors[j],
        beta,
        dims,
        eps,
        trials,
        master,
    )?;
    for row in &rows {
        println!(
            "D={} eps={} tail={} bound={}",
            row.d_out, row.epsilon, row.tail, row.bound
        );
    }
    if let Some(path) = output {
        let mut f = append_csv(&path, "D,epsilon,tail,bound")?;
        for row in &rows {
            writeln!(f, "{},{},{},{}", row.d_out, row.epsilon, row.tail, row.bound)?;
        }
    }
    println!("trials={trials} elapsed_ms={}", start.elapsed().as_millis());
    Ok(())
}

fn cmd_train(
    rff: &Path,
    c: f64,
    epochs: usize,
    seed_flag: Option<u64>,
    model_out: &Path,
) -> Result<()> {
    let master = master_seed(seed_flag);
    let (zs, labels) = read_dense_file(rff)?;
    let rows: Vec<&[f64]> = zs.iter().map(|z| z.values()).collect();
    let start = Instant::now();
    let model = classify::train_linear(&rows, &labels, c, epochs, seed::derive(master, "train"))?;
    io::write_model(&mut create(model_out)?, &model)?;
    let scores: Vec<f64> = rows.iter().map(|z| model.decision(z)).collect();
    println!(
        "n={} dim={} c={c} epochs={epochs} objective={} train_accuracy={} train_auc={} elapsed_ms={}",
        rows.len(),
        model.dim(),
        model.objectives().last().unwrap(),
        classify::accuracy(&model, &rows, &labels),
        classify::auc(&scores, &labels)?,
        start.elapsed().as_millis()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cv(
    features: &Path,
    dim: usize,
    mode: ProjectMode,
    folds: usize,
    betas: &[f64],
    cs: &[f64],
    epochs: usize,
    seed_flag: Option<u64>,
) -> Result<()> {
    let master = master_seed(seed_flag);
    let (vectors, labels) = read_sparse_file(features)?;
    let start = Instant::now();
    let report = classify::cross_validate(
        &vectors,
        &labels,
        dim,
        mode.into(),
        folds,
        betas,
        cs,
        epochs,
        master,
    )?;
    for cell in &report.outcomes {
        println!("beta={} c={} mean_auc={}", cell.beta, cell.c, cell.mean_auc);
    }
    let best = report.best();
    println!(
        "best_beta={} best_c={} best_auc={} folds={folds} dim={dim} elapsed_ms={}",
        best.beta,
        best.c,
        best.mean_auc,
        start.elapsed().as_millis()
    );
    Ok(())
}

fn cmd_predict(rff: &Path, model_path: &Path, scores_out: Option<PathBuf>) -> Result<()> {
    let (zs, labels) = read_dense_file(rff)?;
    let model: LinearModel = io::read_model(&mut open(model_path)?)?;
    let scores: Vec<f64> = zs.iter().map(|z| model.decision(z.values())).collect();
    if let Some(path) = scores_out {
        let mut f = create(&path)?;
        for s in &scores {
            writeln!(f, "{s}")?;
        }
    }
    let rows: Vec<&[f64]> = zs.iter().map(|z| z.values()).collect();
    println!(
        "n={} accuracy={} auc={}",
        zs.len(),
        classify::accuracy(&model, &rows, &labels),
        classify::auc(&scores, &labels)?
    );
    Ok(())
}

fn cmd_edm_oracle(
    s1: &str,
    s2: &str,
    alphabet: Option<String>,
    max_len: usize,
    max_depth: usize,
) -> Result<()> {
    let alpha = alphabet.as_ref().map(|a| a.as_bytes());
    let d = kernel::edm_exact(s1.as_bytes(), s2.as_bytes(), alpha, max_len, max_depth)?;
    println!("edm={d}");
    Ok(())
}
