mod args;
mod io;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, Io, Kind, Strategy};
use io::{open_input, open_output, parse_size, read_input, Metrics, StripTerminator};
use plcpz_core::codec::{decode, Encoder, FactorReader};
use plcpz_core::corpus::{generate, CorpusKind};
use plcpz_core::decompress::{compact_em, decompress_oracle, decompress_pj, decompress_pj_stream, graph_stats, PjStats};
use plcpz_core::factorizer::{compress, pipeline_compress, PipelineStats};
use plcpz_core::streamkit::default_tmp_dir;
use plcpz_core::text_index::{write_index, IndexFile};
use plcpz_core::{build_index, Error, MemoryBudget, Result, Text};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Io(_) => 3,
        Error::Input(_) => 4,
        Error::Decode(_) => 5,
        Error::Cycle(_) => 6,
        Error::Logic(_) => 1,
    }
}

fn budget(cli: &Cli) -> Result<MemoryBudget> {
    if cli.mem.eq_ignore_ascii_case("unbounded") {
        return Ok(MemoryBudget::unbounded());
    }
    let tmp = cli.tmp.clone().unwrap_or_else(default_tmp_dir);
    MemoryBudget::new(parse_size(&cli.mem)?, tmp, parse_size(&cli.block)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("metrics records serialize")
}

fn read_text(path: &Option<std::path::PathBuf>) -> Result<Text> {
    Text::from_content(read_input(path)?)
}

fn pipeline_record(st: &PipelineStats) -> Value {
    let mut v = to_value(st);
    v["total_factors"] = json!(st.total_factors());
    v["coded_factors"] = json!(st.coded_factors());
    v["max_peak_list"] = json!(st.scan.max_peak_list);
    v
}

fn run_compress(io: &Io, theta: u64, index: &Option<std::path::PathBuf>, budget: &MemoryBudget, m: &mut Metrics) -> Result<()> {
    let text = read_text(&io.input)?;
    let mut enc = Encoder::new(open_output(&io.output)?, text.len(), theta)?;
    let st = match index {
        Some(p) => {
            let idx = IndexFile::open(p)?;
            if idx.len() != text.len() {
                return Err(Error::Input(format!(
                    "index covers {} characters but the input has {}",
                    idx.len(),
                    text.len()
                )));
            }
            pipeline_compress(text.as_bytes(), idx.plcp_iter()?, idx.phi_iter()?, theta, budget, &mut enc)?
        }
        None => {
            let b = build_index(&text);
            pipeline_compress(
                text.as_bytes(),
                b.plcp_values().map(Ok),
                b.phi_values().map(Ok),
                theta,
                budget,
                &mut enc,
            )?
        }
    };
    let bytes = enc.finish()?;
    let mut rec = pipeline_record(&st);
    rec["coded_bytes"] = json!(bytes);
    m.emit("compress", rec)
}

fn emit_pj(m: &mut Metrics, st: &PjStats) -> Result<()> {
    for r in &st.rounds {
        m.emit("pj_round", to_value(r))?;
    }
    let mut v = to_value(st);
    v.as_object_mut().unwrap().remove("rounds");
    v["round_count"] = json!(st.round_count());
    v["jump_rounds"] = json!(st.jump_rounds());
    m.emit("pj", v)
}

fn run_decompress(io: &Io, strategy: Strategy, budget: &MemoryBudget, m: &mut Metrics) -> Result<()> {
    let input = open_input(&io.input)?;
    let mut out = StripTerminator::new(open_output(&io.output)?);
    let n = match strategy {
        Strategy::Pj => {
            let reader = FactorReader::new(input)?.with_max_literal_chunk(budget.block_size());
            let n = reader.n();
            let st = decompress_pj_stream(n, reader, budget, &mut out)?;
            emit_pj(m, &st)?;
            n
        }
        Strategy::Oracle => {
            let f = decode(input)?;
            out.write_all(&decompress_oracle(&f)?)?;
            f.n
        }
        Strategy::CompactThenPj => {
            let f = decode(input)?;
            let (c, cs) = compact_em(&f, budget)?;
            drop(f);
            m.emit("compact", to_value(&cs))?;
            let (text, st) = decompress_pj(&c, budget)?;
            emit_pj(m, &st)?;
            out.write_all(&text)?;
            c.n
        }
    };
    out.finish(n)
}

fn run_stats(input: &Option<std::path::PathBuf>, theta: u64, coded: bool, budget: &MemoryBudget, m: &mut Metrics) -> Result<()> {
    let rec = if coded {
        let f = decode(open_input(input)?)?;
        json!({
            "n": f.n,
            "theta": f.theta,
            "references": f.reference_count(),
            "literal_factors": f.literal_factor_count(),
            "literal_chars": f.literal_chars(),
            "total_factors": f.reference_count() + f.literal_chars(),
            "graph": to_value(&graph_stats(&f)?),
        })
    } else {
        let text = read_text(input)?;
        let b = build_index(&text);
        let (f, st) = compress(&text, &b, theta, budget)?;
        let mut v = pipeline_record(&st);
        v["bwt_runs"] = json!(b.bwt_runs());
        v["graph"] = to_value(&graph_stats(&f)?);
        v
    };
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, &rec).map_err(std::io::Error::from)?;
    writeln!(stdout)?;
    m.emit("stats", rec)
}

fn run_theta_sweep(input: &Option<std::path::PathBuf>, from: u64, to: u64, budget: &MemoryBudget, m: &mut Metrics) -> Result<()> {
    if from > to {
        return Err(Error::Config(format!("empty threshold range {from}..={to}")));
    }
    let text = read_text(input)?;
    let b = build_index(&text);
    let mut stdout = std::io::stdout().lock();
    for theta in from..=to {
        let (_, st) = compress(&text, &b, theta, budget)?;
        let rec = json!({
            "theta": theta,
            "n": st.n,
            "references": st.references,
            "literal_chars": st.literal_chars,
            "total_factors": st.total_factors(),
            "coded_factors": st.coded_factors(),
            "max_peak_list": st.scan.max_peak_list,
        });
        writeln!(stdout, "{rec}")?;
        m.emit("theta_sweep", rec)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let budget = budget(cli)?;
    let mut m = Metrics::open(&cli.metrics)?;
    match &cli.command {
        Command::Compress { io, theta, index } => run_compress(io, *theta, index, &budget, &mut m),
        Command::Decompress { io, strategy } => run_decompress(io, *strategy, &budget, &mut m),
        Command::Stats { input, theta, coded } => run_stats(input, *theta, *coded, &budget, &mut m),
        Command::GenCorpus {
            kind,
            m: param,
            len,
            alphabet,
            edit,
            seed,
            output,
        } => {
            let kind = match kind {
                Kind::LowerBound => CorpusKind::LowerBound { m: *param },
                Kind::Random => CorpusKind::Random { alphabet: *alphabet },
                Kind::Repetitive => CorpusKind::Repetitive {
                    edit_per_mille: *edit,
                },
            };
            let data = generate(kind, *seed, parse_size(len)?)?;
            let mut out = open_output(output)?;
            out.write_all(&data)?;
            out.flush()?;
            m.emit("gen_corpus", json!({ "bytes": data.len(), "seed": seed }))
        }
        Command::Index { io } => {
            let text = read_text(&io.input)?;
            let b = build_index(&text);
            let mut out = open_output(&io.output)?;
            write_index(&b, &mut out)?;
            out.flush()?;
            m.emit("index", json!({ "n": b.len(), "bwt_runs": b.bwt_runs() }))
        }
        Command::ThetaSweep { input, from, to } => run_theta_sweep(input, *from, *to, &budget, &mut m),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("plcpz: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
