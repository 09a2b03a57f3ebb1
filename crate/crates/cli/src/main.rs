use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use poset_screen::fixtures::cutoff_scenarios;
use poset_screen::{composition_audit, generate_synthetic_pool, scenario_compare, SyntheticSpec};
use poset_screen_cli::export::{to_json, write_json};
use poset_screen_cli::pipeline::{self, write_constructed, write_outputs, write_selection};
use poset_screen_cli::{ingest_with, Cutoff, IngestOptions, PipelineConfig, Pool, Schema};

#[derive(Parser)]
#[command(name = "poset-screen", version, about = "Partial-order candidate screening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a candidate CSV and summarize it.
    IngestCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "scores")]
        schema: Schema,
        #[arg(long, default_value = "group")]
        group_column: String,
    },
    /// Build intervals and the partial order; write hasse.dot and ranges.csv.
    Construct(RunArgs),
    /// Construct and select; write the selection as JSON and CSV.
    Select(RunArgs),
    /// Full pipeline with audit report, or a workforce composition table.
    Audit {
        #[command(flatten)]
        run: RunArgs,
        /// CSV with columns group,level; tabulated instead of running the pipeline.
        #[arg(long, conflicts_with_all = ["input", "config"])]
        workforce: Option<PathBuf>,
    },
    /// Generate a synthetic scores CSV from a JSON pool spec.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raw against interval cutoffs on the bundled two-group fixtures.
    Scenario {
        /// One fixture by name; all when omitted.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        cutoff: Option<f64>,
        /// Directory for one JSON file per fixture.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "scores")]
    schema: Schema,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's interval method.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Switches to cutoff selection; comma-separated for per-attribute bars.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "k")]
    cutoff: Vec<f64>,
    /// Switches to top-k selection.
    #[arg(long)]
    k: Option<usize>,
    /// Output directory; overrides the config's `outputs`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<(PipelineConfig, Pool, Option<PathBuf>)> {
        let config_path = self.config.as_deref().context("--config is required")?;
        let mut config = PipelineConfig::from_path(config_path)?;
        if let Some(m) = &self.method {
            config.method = m.clone();
        }
        if let Some(s) = self.seed {
            config.seed = Some(s);
        }
        match self.cutoff.as_slice() {
            [] => {}
            [x] => config.set_cutoff(Cutoff::Single(*x)),
            xs => config.set_cutoff(Cutoff::PerAttribute(xs.to_vec())),
        }
        if let Some(k) = self.k {
            config.set_top_k(k);
        }
        config.validate()?;
        let input = self.input.as_deref().context("--input is required")?;
        let options = IngestOptions { group_column: config.group_column().to_owned() };
        let pool = ingest_with(input, self.schema, &options)?;
        let out = self.out.clone().or_else(|| config.outputs.clone());
        Ok((config, pool, out))
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn print(text: &str) -> Result<()> {
    std::io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::IngestCheck { input, schema, group_column } => {
            let pool = ingest_with(&input, schema, &IngestOptions { group_column })?;
            let mut counts = std::collections::BTreeMap::new();
            for c in &pool.candidates {
                *counts.entry(c.group.as_deref().unwrap_or("")).or_insert(0usize) += 1;
            }
            println!("ok: {} candidates ({schema})", pool.len());
            for (g, n) in counts {
                println!("  {}: {n}", if g.is_empty() { "(no group)" } else { g });
            }
        }
        Command::Construct(args) => {
            let (config, pool, out) = args.load()?;
            let c = pipeline::construct(&config, &pool)?;
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_constructed(&c, &dir)?;
                }
                None => print(&poset_screen_cli::hasse_dot(&c.poset))?,
            }
            for line in &c.log {
                eprintln!("{line}");
            }
        }
        Command::Select(args) => {
            let (config, pool, out) = args.load()?;
            let c = pipeline::construct(&config, &pool)?;
            let selection = pipeline::select(&config, &c)?;
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_constructed(&c, &dir)?;
                    write_selection(&selection, &dir)?;
                }
                None => print(&to_json(&selection)?)?,
            }
        }
        Command::Audit { run, workforce: Some(path) } => {
            let mut rdr = csv::Reader::from_path(&path).with_context(|| format!("cannot read {}", path.display()))?;
            let headers = rdr.headers()?.clone();
            if headers.iter().collect::<Vec<_>>() != ["group", "level"] {
                bail!("{}: line 1: workforce header must be group,level", path.display());
            }
            let mut rows = Vec::new();
            for record in rdr.records() {
                let record = record?;
                rows.push((record[0].to_owned(), record[1].to_owned()));
            }
            let table = composition_audit(&rows);
            match run.out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_json(&table, &dir.join("composition.json"))?;
                }
                None => print(&to_json(&table)?)?,
            }
        }
        Command::Audit { run, workforce: None } => {
            let (config, pool, out) = run.load()?;
            let result = pipeline::run_pipeline(&config, &pool)?;
            match out {
                Some(dir) => {
                    ensure_dir(&dir)?;
                    write_outputs(&result, &dir)?;
                }
                None => print(&to_json(&result.report)?)?,
            }
        }
        Command::Simulate { config, seed, out } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("cannot read {}", config.display()))?;
            let mut spec: SyntheticSpec = serde_json::from_str(&text).context("invalid pool spec")?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let pool = generate_synthetic_pool::<f64>(&spec)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "group", "score"])?;
            for c in &pool {
                let c = &c.candidate;
                let score = c.raw_score.expect("synthetic candidates are scored");
                w.write_record([c.id.as_str(), c.group.as_deref().unwrap_or(""), &score.to_string()])?;
            }
            let bytes = w.into_inner()?;
            match out {
                Some(path) => std::fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?,
                None => std::io::stdout().write_all(&bytes)?,
            }
        }
        Command::Scenario { name, cutoff, out } => {
            let scenarios: Vec<_> = cutoff_scenarios()
                .into_iter()
                .filter(|s| name.as_deref().is_none_or(|n| n == s.name))
                .collect();
            if scenarios.is_empty() {
                bail!("no fixture named {:?}", name.unwrap_or_default());
            }
            if let Some(dir) = &out {
                ensure_dir(dir)?;
            }
            for s in scenarios {
                let cmp = scenario_compare(&s.members, cutoff.unwrap_or(s.cutoff))?;
                println!("{}: {}", s.name, s.description);
                for (g, d) in &cmp.delta {
                    println!(
                        "  {g}: raw {} -> interval {} ({d:+})",
                        cmp.raw.per_group[g].selected, cmp.interval.per_group[g].selected
                    );
                }
                println!("  added: {}", cmp.added.join(", "));
                if let Some(dir) = &out {
                    write_json(&cmp, &dir.join(format!("{}.json", s.name)))?;
                }
            }
        }
    }
    Ok(())
}
