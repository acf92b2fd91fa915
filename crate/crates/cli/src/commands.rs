use std::path::{Path, PathBuf};

use chromaword::corpus::{build_corpus, parse_observations, LemmaMap, Stopwords, TokenFilter};
use chromaword::embedding::{init_model, load_word2vec_text, train as train_model, TrainConfig};
use chromaword::eval::{
    evaluate_pairs, load_pairs, rank_pairs, summarize_distribution, write_ranking_csv, write_report_csv, Direction,
    DistributionSummary, Relation, SkipReason,
};
use chromaword::histogram::{analyze, build_histograms, write_quadrants_csv, HistFile};
use chromaword::imaging::extract_batch;
use chromaword::{svg, Error, Palette, Position};
use serde::Serialize;

use crate::args::{EvaluateArgs, ExtractArgs, HistogramArgs, TrainArgs};
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, write_string, RunManifest};

#[derive(Serialize)]
struct ObservationRecord<'a> {
    word: &'a str,
    fg_lab: [f64; 3],
    bg_lab: [f64; 3],
    source: &'a str,
}

fn read_image_manifest(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        match line.split('\t').map(str::trim).collect::<Vec<_>>().as_slice() {
            [file, word] if !file.is_empty() && !word.is_empty() => rows.push((file.to_string(), word.to_string())),
            _ => {
                return Err(Error::parse(
                    path.display().to_string(),
                    Position::Line(idx + 1),
                    "expected path<TAB>word",
                )
                .into())
            }
        }
    }
    Ok(rows)
}

pub fn extract(args: &ExtractArgs, manifest: &mut RunManifest) -> CliResult<()> {
    let listing = args.manifest.clone().expect("resolved");
    manifest.input(&listing)?;
    let rows = read_image_manifest(&listing)?;
    if rows.is_empty() {
        return Err(CliError::Empty(format!("{} lists no images", listing.display())));
    }
    let paths: Vec<PathBuf> = rows.iter().map(|(file, _)| args.images.join(file)).collect();
    for p in &paths {
        if p.is_file() {
            manifest.input(p)?;
        }
    }
    let refs: Vec<&Path> = paths.iter().map(PathBuf::as_path).collect();
    let results = extract_batch::<f64>(&refs, args.fg_class);

    let mut lines = String::new();
    let mut ok = 0;
    for ((file, word), result) in rows.iter().zip(results) {
        match result {
            Ok(sample) => {
                let rec = ObservationRecord {
                    word,
                    fg_lab: sample.fg.to_array(),
                    bg_lab: sample.bg.to_array(),
                    source: file,
                };
                lines.push_str(&serde_json::to_string(&rec).expect("record serializes"));
                lines.push('\n');
                ok += 1;
            }
            Err(e) => log::warn!("skipping {file}: {e}"),
        }
    }
    if ok == 0 {
        return Err(CliError::Empty("no image could be processed".into()));
    }
    log::info!("extracted {ok} of {} images", rows.len());
    write_string(&args.out, &lines)?;
    manifest.output(&args.out);
    Ok(())
}

pub fn histogram(args: &HistogramArgs, manifest: &mut RunManifest) -> CliResult<()> {
    let palette = match &args.palette {
        Some(p) => {
            manifest.input(p)?;
            Palette::load(p)?
        }
        None => Palette::bundled(),
    };
    manifest.palette_version = palette.version().map(str::to_string);
    for p in [&args.observations, &args.lemmas, &args.stopwords] {
        manifest.input(p)?;
    }

    let parsed = parse_observations::<f64>(&args.observations, args.strict)?;
    if !parsed.skipped.is_empty() {
        log::warn!("skipped {} malformed observation lines", parsed.skipped.len());
    }
    let filter = TokenFilter::new(LemmaMap::load(&args.lemmas)?, Stopwords::load(&args.stopwords)?);
    let corpus = build_corpus(parsed.observations, &filter);
    for (reason, n) in corpus.rejected() {
        log::info!("rejected {n} tokens: {reason}");
    }
    let set = build_histograms(&corpus, &palette, args.min_count)?;
    log::info!(
        "{} words retained, {} excluded below min count {}, {} observations dropped",
        set.words.len(),
        set.excluded.len(),
        set.min_count,
        set.dropped_observations
    );

    let quadrants = args.quadrants.clone().expect("resolved");
    let scatter = args.scatter.clone().expect("resolved");
    let report = analyze(&set);
    let plot = svg::particularity_scatter(&report, &palette)?;

    write_string(&args.out, &HistFile::from_set(&set, &palette).to_json())?;
    write_atomic(&quadrants, |w| write_quadrants_csv(&report, &palette, w))?;
    write_string(&scatter, &plot)?;
    for p in [&args.out, &quadrants, &scatter] {
        manifest.output(p);
    }
    Ok(())
}

pub fn train(args: &TrainArgs, manifest: &mut RunManifest) -> CliResult<()> {
    manifest.input(&args.hist)?;
    manifest.input(&args.embeddings)?;
    let hists = HistFile::load(&args.hist)?.histograms::<f64>();
    let pretrained = load_word2vec_text::<f64>(&args.embeddings)?.embeddings;
    let config = TrainConfig {
        learning_rate: args.lr,
        epochs: args.epochs,
        seed: args.seed,
        loss: args.loss,
        init_scale: args.init_scale,
        halve_on_increase: !args.no_halving,
        freeze_input: args.freeze_input,
    };
    let init = init_model(&hists, &pretrained, &config)?;
    if !init.excluded.is_empty() {
        log::warn!(
            "{} histogram words have no pretrained vector: {}",
            init.excluded.len(),
            init.excluded.join(", ")
        );
    }
    let (model, trace) = train_model(&init.model, &init.targets, &config)?;
    log::info!(
        "trained {} words for {} epochs, loss {} -> {}",
        model.vocab().len(),
        args.epochs,
        trace.losses[0],
        trace.final_loss()
    );

    let trace_path = args.trace.clone().expect("resolved");
    let vectors = model.embeddings();
    write_atomic(&args.out, |w| vectors.write_word2vec_text(w))?;
    write_atomic(&trace_path, |w| trace.write_csv(w))?;
    manifest.output(&args.out);
    manifest.output(&trace_path);
    Ok(())
}

#[derive(Serialize)]
struct Skipped<'a> {
    word1: &'a str,
    word2: &'a str,
    relation: Relation,
    #[serde(flatten)]
    reason: &'a SkipReason,
}

#[derive(Serialize)]
struct Summary<'a> {
    evaluated: usize,
    distribution: &'a DistributionSummary,
    skipped: Vec<Skipped<'a>>,
}

pub fn evaluate(args: &EvaluateArgs, manifest: &mut RunManifest) -> CliResult<()> {
    for p in [&args.before, &args.after, &args.pairs, &args.hist] {
        manifest.input(p)?;
    }
    let before = load_word2vec_text::<f64>(&args.before)?.embeddings;
    let after = load_word2vec_text::<f64>(&args.after)?.embeddings;
    let pairs = load_pairs(&args.pairs)?;
    let hists = HistFile::load(&args.hist)?.histograms::<f64>();

    let eval = evaluate_pairs(&before, &after, &pairs, &hists);
    if eval.reports.is_empty() {
        return Err(CliError::Empty(format!(
            "none of the {} pairs has vectors and histograms for both words",
            pairs.len()
        )));
    }
    log::info!("{} pairs evaluated, {} skipped", eval.reports.len(), eval.skipped.len());

    let distribution = summarize_distribution(&eval.reports);
    let summary = Summary {
        evaluated: eval.reports.len(),
        distribution: &distribution,
        skipped: eval
            .skipped
            .iter()
            .map(|(p, reason)| Skipped {
                word1: &p.w1,
                word2: &p.w2,
                relation: p.relation,
                reason,
            })
            .collect(),
    };
    let k = args.top_k as usize;
    let tables: Vec<_> = [Relation::Synonym, Relation::Antonym]
        .into_iter()
        .map(|rel| (rel, rank_pairs(&eval.reports, rel, Direction::expected_for(rel), k)))
        .collect();
    let scatter_svg = svg::pair_scatter(&eval.reports)?;
    let box_svg = svg::box_plot(&distribution)?;

    let scatter = args.scatter.clone().expect("resolved");
    let box_plot = args.box_plot.clone().expect("resolved");
    let summary_path = args.summary.clone().expect("resolved");
    let top = args.top.clone().expect("resolved");

    write_atomic(&args.out, |w| write_report_csv(&eval.reports, w))?;
    write_atomic(&summary_path, |w| {
        serde_json::to_writer_pretty(&mut *w, &summary)?;
        writeln!(w)
    })?;
    write_atomic(&top, |w| write_ranking_csv(&tables, w))?;
    write_string(&scatter, &scatter_svg)?;
    write_string(&box_plot, &box_svg)?;
    for p in [&args.out, &summary_path, &top, &scatter, &box_plot] {
        manifest.output(p);
    }
    Ok(())
}
