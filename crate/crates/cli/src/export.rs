//! Matrix Market export of assembled block systems.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use faer::Mat;
use fembem_core::coupling::BlockSystem;
use fembem_core::linalg::CsrMatrix;
use fembem_core::C64;

/// Writes every block and right-hand side of `system` into `dir`, one
/// Matrix Market file each (`A.mtx`, `B1.mtx` .. `B6.mtx`, `f.mtx`,
/// `r2.mtx`, `r3.mtx`). Sparse blocks use the coordinate format, dense
/// blocks and vectors the array format.
pub fn export_system(system: &BlockSystem, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_sparse(&dir.join("A.mtx"), &system.a_blk)?;
    write_sparse(&dir.join("B1.mtx"), &system.b1)?;
    write_dense(&dir.join("B2.mtx"), &system.b2)?;
    write_dense(&dir.join("B3.mtx"), &system.b3)?;
    write_sparse(&dir.join("B4.mtx"), &system.b4)?;
    write_dense(&dir.join("B5.mtx"), &system.b5)?;
    write_dense(&dir.join("B6.mtx"), &system.b6)?;
    write_vector(&dir.join("f.mtx"), &system.rhs_f)?;
    write_vector(&dir.join("r2.mtx"), &system.rhs_r2)?;
    write_vector(&dir.join("r3.mtx"), &system.rhs_r3)
}

pub fn write_sparse(path: &Path, m: &CsrMatrix) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im)?;
    }
    w.flush()
}

pub fn write_dense(path: &Path, m: &Mat<C64>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix array complex general")?;
    writeln!(w, "{} {}", m.nrows(), m.ncols())?;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            writeln!(w, "{:e} {:e}", m[(i, j)].re, m[(i, j)].im)?;
        }
    }
    w.flush()
}

pub fn write_vector(path: &Path, v: &[C64]) -> io::Result<()> {
    write_dense(path, &Mat::from_fn(v.len(), 1, |i, _| v[i]))
}
