//! Criterion benchmarks of block system assembly and the solvers live in
//! `benches/`; run them with `cargo bench -p fembem-bench`.
