//! Binary dump of a coefficient table: the magic `F3NSPEC1`, `n` as a
//! little-endian `u32`, then `3^n` little-endian `(p, q)` pairs of `i64` in
//! frequency-index order.

use std::io::{self, Read, Write};

use f3n_core::{pow3, Eisenstein, SpectrumTable};

pub const MAGIC: &[u8; 8] = b"F3NSPEC1";

pub fn write_table<W: Write>(mut w: W, t: &SpectrumTable) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&t.n().to_le_bytes())?;
    for c in t.coeffs() {
        w.write_all(&c.p.to_le_bytes())?;
        w.write_all(&c.q.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_table<R: Read>(mut r: R) -> io::Result<SpectrumTable> {
    let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("not a spectrum dump".into()));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word);
    if n == 0 || n > f3n_core::fourier::TRANSFORM_HARD_LIMIT {
        return Err(bad(format!("unsupported dimension {n}")));
    }
    let mut buf = [0u8; 16];
    let mut coeffs = Vec::with_capacity(pow3(n) as usize);
    for _ in 0..pow3(n) {
        r.read_exact(&mut buf)?;
        let p = i64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let q = i64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        coeffs.push(Eisenstein::new(p, q));
    }
    if r.read(&mut buf[..1])? != 0 {
        return Err(bad("trailing bytes after table".into()));
    }
    SpectrumTable::from_coeffs(n, coeffs).map_err(|e| bad(e.to_string()))
}
