//! `protofsm index`

use serde_json::json;

use protofsm::filter::{builtin_keywords, KeywordSet};
use protofsm::infer::build_index;

use crate::config::RunConfig;
use crate::table::selection_table;
use crate::{
    commands::{build_segmenter, write_output},
    CliError, ConfigArgs,
};

pub(crate) fn keyword_set(config: &RunConfig) -> Result<KeywordSet, CliError> {
    match &config.keyword_file {
        Some(path) => Ok(KeywordSet::from_file(&config.protocol, path)?),
        None => Ok(builtin_keywords(&config.protocol)?),
    }
}

pub fn run(args: &ConfigArgs, dump_chunks: bool) -> Result<(), CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    let keywords = keyword_set(&config)?;
    let segmenter = build_segmenter(&config)?;

    let outcome = build_index(
        &config.repo,
        &keywords,
        &config.filter,
        &segmenter,
        &config.embedding,
    )?;

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::Input(format!("cannot create output directory: {e}")))?;
    let index_path = config.index_path();
    outcome.index.save(&index_path)?;

    let selection_json = serde_json::to_string_pretty(&json!({
        "selection": outcome.selection,
        "repo_snapshot_id": outcome.repo_snapshot_id,
        "documents": outcome.matches,
    }))
    .expect("selection serializes");
    write_output(
        &config.output_dir.join("selection.json"),
        &format!("{selection_json}\n"),
    )?;

    if dump_chunks {
        let body = serde_json::to_string_pretty(&outcome.chunk_ranges)
            .expect("chunk manifest serializes");
        write_output(&config.output_dir.join("chunks.json"), &format!("{body}\n"))?;
    }

    print!("{}", selection_table(&outcome.selection));
    println!(
        "indexed {} chunks into {}",
        outcome.index.entries().len(),
        index_path.display()
    );
    Ok(())
}
