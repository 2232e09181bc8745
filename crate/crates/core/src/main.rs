use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use softskill::clueminer::{
    build_seed_patterns_with_cap, contexts_from_matches, format_clue_tsv, group_variants, pareto_cutoff, pre_annotate,
    read_seed_file,
};
use softskill::config::Config;
use softskill::corpus::{format_conll, naive_annotate, read_conll, Annotator, Corpus};
use softskill::eval::{evaluate, format_report_table, format_report_tsv, split_corpus, winner, SplitConfig, Winner};
use softskill::graph::{
    align_partition, format_assignments, format_gexf, format_partition_tsv, louvain, parse_assignments,
    parse_partition_tsv, project, stats, CoocGraph, ProjectionMode,
};
use softskill::ingest::{
    conll_skill_texts, extract_skills, format_extractions_tsv, ingest_esco, naive_skill_texts, to_assignments, Fields,
};
use softskill::matcher::{find_all, DEFAULT_MAX_WILDCARD};
use softskill::mlp::train_mlp_with_embeddings;
use softskill::model::{format_model, read_model, TaggerModel};
use softskill::provenance::{format_header, parse_header, Provenance, NO_MODEL};
use softskill::svm::train_svm;
use softskill::synth::{generate, SynthConfig};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_THRESHOLD: f64 = 0.8;

/// Soft-skill mining: clue mining, BIO tagging with a linear SVM or an MLP,
/// extraction over skill taxonomies and co-occurrence graph clustering.
#[derive(Debug, Parser)]
#[command(name = "softskill", version, about, propagate_version = true)]
struct Cli {
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random choice (training order, init, split, Louvain).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only print errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine clue phrases around seed skills and keep the Pareto head.
    #[command(group(ArgGroup::new("input").required(true).args(["corpus", "text"])))]
    MineClues {
        /// Annotated CoNLL corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Raw text, tokenized with the built-in annotator.
        #[arg(long)]
        text: Option<PathBuf>,
        /// Seed skills, `label<TAB>lemma lemma ...` per line.
        #[arg(long)]
        seeds: PathBuf,
        /// Clue table (TSV).
        #[arg(long)]
        out: PathBuf,
        /// Cumulative frequency share to keep, in (0, 1].
        #[arg(long, value_parser = parse_fraction)]
        threshold: Option<f64>,
        /// Most tokens a wildcard may absorb.
        #[arg(long)]
        max_wildcard: Option<usize>,
    },
    /// Tokenize raw text into a CoNLL corpus, optionally pre-tagged with
    /// the contexts matched by seed patterns.
    Annotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Seed skills used to propose BIO tags.
        #[arg(long)]
        seeds: Option<PathBuf>,
        #[arg(long)]
        max_wildcard: Option<usize>,
        /// Source id of the produced sentences (default: input file stem).
        #[arg(long)]
        source_id: Option<String>,
    },
    /// Write a synthetic BIO-tagged job-ad corpus.
    Synth {
        #[arg(long, default_value_t = SynthConfig::default().sentences)]
        sentences: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a tagger on a BIO-tagged CoNLL corpus.
    Train {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        /// SVM regularization constant.
        #[arg(long)]
        c: Option<f64>,
        /// MLP: pretrained vectors, `word v1 ... vN` per line.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// MLP mini-batch size.
        #[arg(long)]
        batch_size: Option<usize>,
        /// MLP Adam step size.
        #[arg(long)]
        learning_rate: Option<f64>,
    },
    /// Score a stored model on a tagged corpus, or train and compare both
    /// taggers on a seeded split.
    #[command(group(ArgGroup::new("what").required(true).args(["model", "compare"])))]
    Eval {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        compare: bool,
        #[arg(long)]
        corpus: PathBuf,
        /// Held-out share for --compare.
        #[arg(long, value_parser = parse_open_fraction)]
        test_fraction: Option<f64>,
        /// Report (TSV); the summary table goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a tagger over skill labels and descriptions and flag soft skills.
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        skills: PathBuf,
        #[arg(long)]
        occupations: PathBuf,
        #[arg(long)]
        relations: PathBuf,
        /// `naive` tokenizes here; `external-conll` reads --conll.
        #[arg(long, value_enum)]
        annotator: Option<AnnotatorArg>,
        /// Parsed skill texts with source ids `<skill_id>#label` and
        /// `<skill_id>#description`.
        #[arg(long, required_if_eq("annotator", "external-conll"))]
        conll: Option<PathBuf>,
        #[arg(long, value_enum)]
        fields: Option<FieldsArg>,
        /// Extraction table (TSV).
        #[arg(long)]
        out: PathBuf,
        /// Occupation/soft-skill pairs (CSV) for `graph`.
        #[arg(long)]
        assignments_out: Option<PathBuf>,
    },
    /// Project an assignment table and cluster it with Louvain.
    Graph {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        resolution: Option<f64>,
        /// Partition table (TSV).
        #[arg(long)]
        out: PathBuf,
        /// Also write the clustered graph as GEXF.
        #[arg(long)]
        gexf: Option<PathBuf>,
    },
    /// Write a projection as GEXF, with communities from a partition table.
    ExportGexf {
        #[arg(long)]
        assignments: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Svm,
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnnotatorArg {
    Naive,
    ExternalConll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldsArg {
    Label,
    Description,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Skill,
    Job,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1]"))
    }
}

fn parse_open_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

/// Resolved settings shared by every subcommand.
struct Ctx {
    config: Config,
    seed: u64,
    quiet: bool,
}

impl Ctx {
    fn say(&self, text: &str) {
        if !self.quiet {
            println!("{text}");
        }
    }

    fn max_wildcard(&self, flag: Option<usize>) -> usize {
        flag.or(self.config.clues.max_wildcard).unwrap_or(DEFAULT_MAX_WILDCARD)
    }

    fn mode(&self, flag: Option<ModeArg>) -> Result<ProjectionMode> {
        if let Some(m) = flag {
            return Ok(match m {
                ModeArg::Skill => ProjectionMode::Skill,
                ModeArg::Job => ProjectionMode::Job,
            });
        }
        match self.config.graph.mode.as_deref() {
            None | Some("skill") => Ok(ProjectionMode::Skill),
            Some("job") => Ok(ProjectionMode::Job),
            Some(other) => bail!("config: graph.mode must be skill or job, got {other:?}"),
        }
    }
}

fn mode_name(mode: ProjectionMode) -> &'static str {
    match mode {
        ProjectionMode::Skill => "skill",
        ProjectionMode::Job => "job",
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn corpus_annotator(corpus: &Corpus) -> String {
    corpus.annotator().map_or("unknown", Annotator::as_str).to_string()
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Ok(read_conll(path)?)
}

fn warn_if_naive(corpus: &Corpus) {
    if corpus.annotator() == Some(Annotator::Naive) {
        log::warn!(
            "the built-in annotator assigns POS X and unreduced lemmas; POS-constrained seed pattern steps cannot match"
        );
    }
}

/// `err` and its causes joined by `: `, skipping causes whose text the
/// message already contains.
fn error_chain(err: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if msg.contains(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

fn mine_clues(
    ctx: &Ctx,
    corpus: Option<PathBuf>,
    text: Option<PathBuf>,
    seeds: PathBuf,
    out: PathBuf,
    threshold: Option<f64>,
    max_wildcard: Option<usize>,
) -> Result<()> {
    let corpus = match (corpus, text) {
        (Some(path), _) => load_corpus(&path)?,
        (None, Some(path)) => {
            let mut c = Corpus::new(naive_annotate(&read(&path)?, &file_stem(&path)));
            c.set_annotator(Annotator::Naive);
            c
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    warn_if_naive(&corpus);
    let threshold = threshold.or(ctx.config.clues.threshold).unwrap_or(DEFAULT_THRESHOLD);
    let cap = ctx.max_wildcard(max_wildcard);
    let seeds = read_seed_file(&seeds)?;
    let patterns = build_seed_patterns_with_cap(&seeds, cap)?;
    let hits = contexts_from_matches(&seeds, &corpus.sentences, find_all(&patterns, &corpus.sentences));
    let records = group_variants(&hits);
    let kept = pareto_cutoff(&records, threshold)?;

    let prov = Provenance::new(NO_MODEL, ctx.seed, corpus_annotator(&corpus));
    let header = prov.pairs(&[
        ("threshold", threshold.to_string()),
        ("max_wildcard", cap.to_string()),
        ("seed_skills", seeds.len().to_string()),
        ("contexts", hits.len().to_string()),
        ("clues_total", records.len().to_string()),
        ("clues_kept", kept.len().to_string()),
    ]);
    write(&out, &(format_header(&header) + &format_clue_tsv(&kept)))?;
    ctx.say(&format!(
        "{} contexts, {} clue groups, {} kept at threshold {threshold}",
        hits.len(),
        records.len(),
        kept.len()
    ));
    Ok(())
}

fn annotate(
    ctx: &Ctx,
    input: PathBuf,
    out: PathBuf,
    seeds: Option<PathBuf>,
    max_wildcard: Option<usize>,
    source_id: Option<String>,
) -> Result<()> {
    let source_id = source_id.unwrap_or_else(|| file_stem(&input));
    let mut corpus = Corpus::new(naive_annotate(&read(&input)?, &source_id));
    let prov = Provenance::new(NO_MODEL, ctx.seed, Annotator::Naive.as_str());
    let mut extra = Vec::new();
    if let Some(seeds) = seeds {
        let seeds = read_seed_file(&seeds)?;
        corpus.set_annotator(Annotator::Naive);
        warn_if_naive(&corpus);
        let spans = pre_annotate(&seeds, &mut corpus.sentences, ctx.max_wildcard(max_wildcard))?;
        extra.push(("pre_annotated_spans", spans.to_string()));
    }
    for (k, v) in prov.pairs(&extra) {
        corpus.set_meta(&k, &v);
    }
    write(&out, &format_conll(&corpus))?;
    ctx.say(&format!("{} sentences, {} tokens", corpus.sentences.len(), corpus.token_count()));
    Ok(())
}

fn synth(ctx: &Ctx, sentences: usize, out: PathBuf) -> Result<()> {
    let cfg = SynthConfig {
        sentences,
        seed: ctx.seed,
        ..SynthConfig::default()
    };
    let mut corpus = Corpus::new(generate(&cfg));
    let prov = Provenance::new(NO_MODEL, ctx.seed, Annotator::External.as_str());
    for (k, v) in prov.pairs(&[("generator", "synthetic job ads".to_string())]) {
        corpus.set_meta(&k, &v);
    }
    write(&out, &format_conll(&corpus))?;
    ctx.say(&format!("{} sentences, {} tokens", corpus.sentences.len(), corpus.token_count()));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn train(
    ctx: &Ctx,
    kind: ModelKind,
    corpus_path: PathBuf,
    out: PathBuf,
    epochs: Option<usize>,
    c: Option<f64>,
    embeddings: Option<PathBuf>,
    batch_size: Option<usize>,
    learning_rate: Option<f64>,
) -> Result<()> {
    let corpus = load_corpus(&corpus_path)?;
    let mut extra = vec![
        ("annotator".to_string(), corpus_annotator(&corpus)),
        ("train_sentences".to_string(), corpus.sentences.len().to_string()),
    ];
    let model = match kind {
        ModelKind::Svm => {
            let mut cfg = ctx.config.svm_config(ctx.seed);
            cfg.epochs = epochs.unwrap_or(cfg.epochs);
            cfg.c = c.unwrap_or(cfg.c);
            TaggerModel::Svm(train_svm(&corpus.sentences, &cfg)?)
        }
        ModelKind::Mlp => {
            let mut cfg = ctx.config.mlp_config(ctx.seed);
            cfg.epochs = epochs.unwrap_or(cfg.epochs);
            cfg.batch_size = batch_size.unwrap_or(cfg.batch_size);
            cfg.learning_rate = learning_rate.unwrap_or(cfg.learning_rate);
            let text = embeddings.as_deref().map(read).transpose()?;
            let (model, loaded) = train_mlp_with_embeddings(&corpus.sentences, &cfg, text.as_deref())?;
            if text.is_some() {
                extra.push(("pretrained_vectors".to_string(), loaded.to_string()));
            }
            TaggerModel::Mlp(model)
        }
    };
    write(&out, &format_model(&model, &extra))?;
    ctx.say(&format!("{} model {} written to {}", model.kind(), model.model_id(), out.display()));
    Ok(())
}

fn eval(
    ctx: &Ctx,
    model: Option<PathBuf>,
    corpus_path: PathBuf,
    test_fraction: Option<f64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let corpus = load_corpus(&corpus_path)?;
    let annotator = corpus.annotator();
    let (text, table) = if let Some(path) = model {
        let stored = read_model(&path)?;
        let mut report = evaluate(&stored.model, &corpus.sentences)?;
        report.annotator = annotator;
        let name = stored.model.kind();
        let prov = Provenance::new(stored.model.model_id(), stored.model.seed(), corpus_annotator(&corpus));
        let header = prov.pairs(&[("test_sentences", corpus.sentences.len().to_string())]);
        let reports = [(name, &report)];
        (
            format_header(&header) + &format_report_tsv(&reports),
            format_report_table(&reports),
        )
    } else {
        let split = SplitConfig {
            test_fraction: test_fraction
                .or(ctx.config.eval.test_fraction)
                .unwrap_or(SplitConfig::default().test_fraction),
            seed: ctx.seed,
        };
        let (train_set, test_set) = split_corpus(&corpus.sentences, &split)?;
        let svm = TaggerModel::Svm(train_svm(&train_set, &ctx.config.svm_config(ctx.seed))?);
        let mlp = TaggerModel::Mlp(train_mlp_with_embeddings(&train_set, &ctx.config.mlp_config(ctx.seed), None)?.0);
        let mut svm_report = evaluate(&svm, &test_set)?;
        let mut mlp_report = evaluate(&mlp, &test_set)?;
        svm_report.annotator = annotator;
        mlp_report.annotator = annotator;
        let best = match winner(&svm_report, &mlp_report) {
            Winner::First => "svm",
            Winner::Second => "mlp",
            Winner::Tie => "tie",
        };
        let prov = Provenance::new(
            format!("svm:{},mlp:{}", svm.model_id(), mlp.model_id()),
            ctx.seed,
            corpus_annotator(&corpus),
        );
        let header = prov.pairs(&[
            ("train_sentences", train_set.len().to_string()),
            ("test_sentences", test_set.len().to_string()),
            ("test_fraction", split.test_fraction.to_string()),
            ("winner", best.to_string()),
        ]);
        let reports = [("svm", &svm_report), ("mlp", &mlp_report)];
        (
            format_header(&header) + &format_report_tsv(&reports),
            format!("{}winner: {best}", format_report_table(&reports)),
        )
    };
    if let Some(out) = out {
        write(&out, &text)?;
    }
    ctx.say(table.trim_end());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extract(
    ctx: &Ctx,
    model: PathBuf,
    skills: PathBuf,
    occupations: PathBuf,
    relations: PathBuf,
    annotator: Option<AnnotatorArg>,
    conll: Option<PathBuf>,
    fields: Option<FieldsArg>,
    out: PathBuf,
    assignments_out: Option<PathBuf>,
) -> Result<()> {
    let stored = read_model(&model)?;
    let ingest = ingest_esco(&skills, &occupations, &relations)?;
    let fields = match fields {
        Some(FieldsArg::Label) => Fields::Label,
        Some(FieldsArg::Description) => Fields::Description,
        Some(FieldsArg::Both) => Fields::Both,
        None => match ctx.config.extract.fields.as_deref() {
            Some(f) => f.parse().map_err(anyhow::Error::msg).context("config: extract.fields")?,
            None => Fields::Both,
        },
    };
    let annotator = match annotator {
        Some(AnnotatorArg::Naive) => Annotator::Naive,
        Some(AnnotatorArg::ExternalConll) => Annotator::External,
        None => match ctx.config.extract.annotator.as_deref() {
            Some(a) => a.parse().map_err(anyhow::Error::msg).context("config: extract.annotator")?,
            None if conll.is_some() => Annotator::External,
            None => Annotator::Naive,
        },
    };
    let texts = match annotator {
        Annotator::Naive => naive_skill_texts(&ingest.records, fields),
        Annotator::External => {
            let Some(path) = conll else {
                bail!("the external-conll annotator needs --conll");
            };
            conll_skill_texts(&ingest.records, &load_corpus(&path)?.sentences, fields)
        }
    };
    let model_id = stored.model.model_id();
    let results = extract_skills(&texts, &stored.model, &model_id, annotator);
    let soft: BTreeSet<String> = results.iter().filter(|r| r.is_soft()).map(|r| r.skill_id.clone()).collect();
    let assignments = to_assignments(&ingest.records, Some(&soft));
    let jobs: BTreeSet<&str> = assignments.iter().map(|a| a.job_id.as_str()).collect();

    let prov = Provenance::new(&model_id, stored.model.seed(), annotator.as_str());
    let field_name = match fields {
        Fields::Label => "label",
        Fields::Description => "description",
        Fields::Both => "both",
    };
    let header = prov.pairs(&[
        ("fields", field_name.to_string()),
        ("records", ingest.records.len().to_string()),
        ("dropped_relations", ingest.dropped().to_string()),
        ("skills", results.len().to_string()),
        ("soft_skills", soft.len().to_string()),
        ("jobs_with_soft_skills", jobs.len().to_string()),
    ]);
    write(&out, &format_extractions_tsv(&results, &header))?;
    if let Some(path) = assignments_out {
        write(&path, &format_assignments(&assignments, &header))?;
    }
    ctx.say(&format!(
        "{} of {} skills flagged soft across {} jobs",
        soft.len(),
        results.len(),
        jobs.len()
    ));
    Ok(())
}

/// Projection of an assignment table plus the provenance found in its header.
fn load_projection(path: &Path, mode: ProjectionMode) -> Result<(CoocGraph, Provenance)> {
    let text = read(path)?;
    let rows = parse_assignments(text.as_bytes()).with_context(|| format!("parsing {}", path.display()))?;
    Ok((project(&rows, mode), Provenance::from_header(&parse_header(&text))))
}

fn graph(
    ctx: &Ctx,
    assignments: PathBuf,
    mode: Option<ModeArg>,
    resolution: Option<f64>,
    out: PathBuf,
    gexf: Option<PathBuf>,
) -> Result<()> {
    let mode = ctx.mode(mode)?;
    let gamma = resolution.or(ctx.config.graph.resolution).unwrap_or(1.0);
    if !(gamma.is_finite() && gamma > 0.0) {
        bail!("resolution must be a positive number, got {gamma}");
    }
    let (g, source) = load_projection(&assignments, mode)?;
    let (partition, _) = louvain(&g, gamma, ctx.seed);
    let st = stats(&g);
    let prov = Provenance::new(source.model_id, ctx.seed, source.annotator);
    let header = prov.pairs(&[
        ("mode", mode_name(mode).to_string()),
        ("nodes", st.nodes.to_string()),
        ("edges", st.edges.to_string()),
        ("average_degree", st.average_degree.to_string()),
        ("average_weighted_degree", st.average_weighted_degree.to_string()),
        ("communities", partition.community_count().to_string()),
    ]);
    write(&out, &format_partition_tsv(&g, &partition, &header))?;
    if let Some(path) = gexf {
        let mut meta = header.clone();
        meta.push(("resolution".into(), gamma.to_string()));
        meta.push(("modularity".into(), partition.modularity.to_string()));
        write(&path, &format_gexf(&g, Some(&partition.assignment), &meta)?)?;
    }
    ctx.say(&format!(
        "{} nodes, {} edges, average degree {:.2}, {} communities, Q = {:.4}",
        st.nodes,
        st.edges,
        st.average_degree,
        partition.community_count(),
        partition.modularity
    ));
    Ok(())
}

fn export_gexf(
    ctx: &Ctx,
    assignments: PathBuf,
    mode: Option<ModeArg>,
    partition: Option<PathBuf>,
    out: PathBuf,
) -> Result<()> {
    let mode = ctx.mode(mode)?;
    let (g, source) = load_projection(&assignments, mode)?;
    let mut extra = vec![("mode", mode_name(mode).to_string())];
    let communities = match &partition {
        Some(path) => {
            let text = read(path)?;
            let rows = parse_partition_tsv(&text).with_context(|| format!("parsing {}", path.display()))?;
            for (k, v) in parse_header(&text) {
                match k.as_str() {
                    "resolution" => extra.push(("resolution", v)),
                    "modularity" => extra.push(("modularity", v)),
                    _ => {}
                }
            }
            Some(align_partition(&g, &rows).with_context(|| format!("matching {} to the graph", path.display()))?)
        }
        None => None,
    };
    let prov = Provenance::new(source.model_id, ctx.seed, source.annotator);
    write(&out, &format_gexf(&g, communities.as_deref(), &prov.pairs(&extra))?)?;
    ctx.say(&format!("{} nodes, {} edges written to {}", g.node_count(), g.edge_count(), out.display()));
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::read(path)?,
        None => Config::default(),
    };
    let ctx = Ctx {
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        config,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::MineClues {
            corpus,
            text,
            seeds,
            out,
            threshold,
            max_wildcard,
        } => mine_clues(&ctx, corpus, text, seeds, out, threshold, max_wildcard),
        Command::Annotate {
            input,
            out,
            seeds,
            max_wildcard,
            source_id,
        } => annotate(&ctx, input, out, seeds, max_wildcard, source_id),
        Command::Synth { sentences, out } => synth(&ctx, sentences, out),
        Command::Train {
            model,
            corpus,
            out,
            epochs,
            c,
            embeddings,
            batch_size,
            learning_rate,
        } => train(&ctx, model, corpus, out, epochs, c, embeddings, batch_size, learning_rate),
        Command::Eval {
            model,
            compare: _,
            corpus,
            test_fraction,
            out,
        } => eval(&ctx, model, corpus, test_fraction, out),
        Command::Extract {
            model,
            skills,
            occupations,
            relations,
            annotator,
            conll,
            fields,
            out,
            assignments_out,
        } => extract(
            &ctx,
            model,
            skills,
            occupations,
            relations,
            annotator,
            conll,
            fields,
            out,
            assignments_out,
        ),
        Command::Graph {
            assignments,
            mode,
            resolution,
            out,
            gexf,
        } => graph(&ctx, assignments, mode, resolution, out, gexf),
        Command::ExportGexf {
            assignments,
            mode,
            partition,
            out,
        } => export_gexf(&ctx, assignments, mode, partition, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Warn })
        .parse_default_env()
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", error_chain(&err));
            ExitCode::from(2)
        }
    }
}
