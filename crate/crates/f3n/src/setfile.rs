//! Text set files: a header line `n=<dim>`, then one base-3 string per
//! point. Blank lines and `#` comments are skipped; duplicates are
//! rejected.

use std::fs;
use std::io::Write;
use std::path::Path;

use f3n_core::{Error, PointSet, Result, TritVector};

pub fn parse(text: &str) -> Result<PointSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty set file".into()))?;
    let n: u32 = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected header `n=<dim>`, found `{header}`")))?;
    let mut points = Vec::new();
    for (lineno, line) in lines {
        let v: TritVector = line
            .parse()
            .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
        if v.dim() != n {
            return Err(Error::Parse(format!(
                "line {lineno}: `{line}` has length {}, expected {n}",
                v.dim()
            )));
        }
        points.push(v);
    }
    if points.is_empty() {
        // validate n even for an empty set
        TritVector::zero(n)?;
    }
    PointSet::new_unique(n, points)
}

pub fn render(set: &PointSet) -> String {
    let mut out = format!("n={}\n", set.n());
    for p in set.iter() {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

pub fn read(path: &Path) -> std::io::Result<Result<PointSet>> {
    Ok(parse(&fs::read_to_string(path)?))
}

pub fn write(path: &Path, set: &PointSet) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(render(set).as_bytes())?;
    f.sync_all()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = f3n_core::capset::greedy_random_capset(4, 3).unwrap();
        assert_eq!(parse(&render(&s)).unwrap(), s);
        let empty = PointSet::empty(3).unwrap();
        assert_eq!(render(&empty), "n=3\n");
        assert_eq!(parse("n=3\n").unwrap(), empty);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse("n=2\n01\n01\n"),
            Err(Error::DuplicatePoint(_))
        ));
        assert!(matches!(parse("n=2\n013\n"), Err(Error::Parse(_))));
        assert!(matches!(parse("n=2\n03\n"), Err(Error::Parse(_))));
        assert!(matches!(parse("dim=2\n01\n"), Err(Error::Parse(_))));
        assert!(parse("").is_err());
        assert!(parse("n=0\n").is_err());
        assert_eq!(parse("# cap\nn=2\n\n01\n 12 \n").unwrap().len(), 2);
    }
}
