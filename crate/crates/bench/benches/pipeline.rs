use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use plcpz_bench::inputs;
use plcpz_core::codec::decode;
use plcpz_core::decompress::{compact_em, decompress_oracle, decompress_pj};
use plcpz_core::factorizer::compress;
use plcpz_core::{build_index, MemoryBudget};

const LEN: usize = 256 * 1024;

fn pipeline(c: &mut Criterion) {
    let inputs = inputs(LEN);
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    g.throughput(Throughput::Bytes(LEN as u64));
    for inp in &inputs {
        g.bench_with_input(BenchmarkId::new("index", inp.name), inp, |b, inp| {
            b.iter(|| build_index(black_box(&inp.text)))
        });
        g.bench_with_input(BenchmarkId::new("compress", inp.name), inp, |b, inp| {
            b.iter(|| compress(&inp.text, &inp.index, 2, &MemoryBudget::unbounded()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("decode", inp.name), inp, |b, inp| {
            b.iter(|| decode(black_box(&inp.coded[..])).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("oracle", inp.name), inp, |b, inp| {
            b.iter(|| decompress_oracle(&inp.coding).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("pj", inp.name), inp, |b, inp| {
            b.iter(|| decompress_pj(&inp.coding, &MemoryBudget::unbounded()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("pj_1MiB", inp.name), inp, |b, inp| {
            let dir = std::env::temp_dir();
            b.iter(|| {
                let budget = MemoryBudget::new(1 << 20, &dir, 4096).unwrap();
                decompress_pj(&inp.coding, &budget).unwrap()
            })
        });
        g.bench_with_input(BenchmarkId::new("compact_em", inp.name), inp, |b, inp| {
            b.iter(|| compact_em(&inp.coding, &MemoryBudget::unbounded()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
