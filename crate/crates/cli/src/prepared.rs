//! On-disk layout of a preprocessed corpus.
//!
//! ```text
//! slices.tsv          index, slice id, speeches, tokens
//! slicing.txt         slicing config the corpus was cut with
//! slices/NNN.txt      one speech per line, tokens separated by spaces
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use diachrony::preprocess::{FULL_STOP, STOPWORD_TAG};

use crate::error::{CliError, Result};
use crate::manifest::OutputDir;

/// A slice id with its token stream.
pub type Slice = (String, Vec<String>);

pub const INDEX_FILE: &str = "slices.tsv";
pub const SLICING_FILE: &str = "slicing.txt";

pub fn slice_file(index: usize) -> String {
    format!("slices/{index:03}.txt")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    pub keep_full_stops: bool,
    pub drop_stopword_tags: bool,
}

/// Writes the slice index and token files. Each slice is a list of
/// speeches, each a list of tokens.
pub fn write_prepared(out: &OutputDir, slices: &[(String, Vec<Vec<String>>)]) -> Result<()> {
    out.write_with(INDEX_FILE, |w| {
        writeln!(w, "index\tslice\tspeeches\ttokens")?;
        for (i, (id, speeches)) in slices.iter().enumerate() {
            let tokens: usize = speeches.iter().map(Vec::len).sum();
            writeln!(w, "{i}\t{id}\t{}\t{tokens}", speeches.len())?;
        }
        Ok(())
    })?;
    for (i, (_, speeches)) in slices.iter().enumerate() {
        out.write_with(&slice_file(i), |w| {
            for s in speeches {
                writeln!(w, "{}", s.join(" "))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// Slice ids in index order.
pub fn slice_ids(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(INDEX_FILE);
    let file = File::open(&path).map_err(|e| CliError::read(&path, e))?;
    let mut ids = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::read(&path, e))?;
        if n == 0 || line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let index: usize = cols
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| CliError::read(&path, format!("line {}: bad index", n + 1)))?;
        let id = cols
            .next()
            .ok_or_else(|| CliError::read(&path, format!("line {}: missing slice id", n + 1)))?;
        if index != ids.len() {
            return Err(CliError::read(
                &path,
                format!("line {}: indices must run 0, 1, 2, ...", n + 1),
            ));
        }
        ids.push(id.to_string());
    }
    if ids.is_empty() {
        return Err(CliError::read(&path, "no slices"));
    }
    Ok(ids)
}

/// Token stream of one slice, ready for training.
pub fn load_slice(dir: &Path, index: usize, options: LoadOptions) -> Result<Vec<String>> {
    let path = dir.join(slice_file(index));
    let file = File::open(&path).map_err(|e| CliError::read(&path, e))?;
    let mut tokens = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::read(&path, e))?;
        tokens.extend(
            line.split_whitespace()
                .filter(|t| options.keep_full_stops || *t != FULL_STOP)
                .filter(|t| !options.drop_stopword_tags || *t != STOPWORD_TAG)
                .map(str::to_string),
        );
    }
    Ok(tokens)
}

/// Loads the named slices (all when `wanted` is empty) in index order
/// unless `wanted` fixes an order.
pub fn load_slices(dir: &Path, wanted: &[String], options: LoadOptions) -> Result<Vec<Slice>> {
    let ids = slice_ids(dir)?;
    let picked: Vec<usize> = if wanted.is_empty() {
        (0..ids.len()).collect()
    } else {
        wanted
            .iter()
            .map(|w| {
                ids.iter()
                    .position(|id| id == w)
                    .ok_or_else(|| CliError::input(format!("unknown slice {w:?}; available: {}", ids.join(", "))))
            })
            .collect::<Result<_>>()?
    };
    picked
        .into_iter()
        .map(|i| Ok((ids[i].clone(), load_slice(dir, i, options)?)))
        .collect()
}

/// Splits `a:b` into two known slice ids. Ids may themselves contain
/// colons; the split must leave two known ids.
pub fn parse_pair(spec: &str, ids: &[String]) -> Result<(String, String)> {
    let splits: Vec<(String, String)> = spec
        .match_indices(':')
        .map(|(i, _)| (spec[..i].to_string(), spec[i + 1..].to_string()))
        .filter(|(a, b)| ids.contains(a) && ids.contains(b))
        .collect();
    match splits.len() {
        1 => Ok(splits.into_iter().next().expect("one split")),
        0 => Err(CliError::input(format!(
            "pair {spec:?} must be two slice ids joined by ':'; available: {}",
            ids.join(", ")
        ))),
        _ => Err(CliError::input(format!("pair {spec:?} is ambiguous"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_filters() {
        let d = tempfile::tempdir().unwrap();
        let out = OutputDir::create(d.path(), &[]).unwrap();
        let speech = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
        let slices = vec![
            ("1990s".to_string(), vec![speech("a b ."), speech("@sw c .")]),
            ("2000s".to_string(), vec![speech("d")]),
        ];
        write_prepared(&out, &slices).unwrap();
        assert_eq!(slice_ids(d.path()).unwrap(), vec!["1990s", "2000s"]);
        assert_eq!(
            load_slice(d.path(), 0, LoadOptions::default()).unwrap(),
            vec!["a", "b", "@sw", "c"]
        );
        let opts = LoadOptions {
            keep_full_stops: true,
            drop_stopword_tags: true,
        };
        assert_eq!(load_slice(d.path(), 0, opts).unwrap(), vec!["a", "b", ".", "c", "."]);
        let picked = load_slices(d.path(), &["2000s".into()], LoadOptions::default()).unwrap();
        assert_eq!(picked, vec![("2000s".to_string(), vec!["d".to_string()])]);
        assert!(load_slices(d.path(), &["1980s".into()], LoadOptions::default()).is_err());
    }

    #[test]
    fn pairs() {
        let ids: Vec<String> = ["1990s", "2000s", "p:7"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            parse_pair("1990s:2000s", &ids).unwrap(),
            ("1990s".into(), "2000s".into())
        );
        assert_eq!(parse_pair("p:7:1990s", &ids).unwrap(), ("p:7".into(), "1990s".into()));
        assert!(parse_pair("1990s-2000s", &ids).is_err());
        assert!(parse_pair("1990s:1980s", &ids).is_err());
    }
}
