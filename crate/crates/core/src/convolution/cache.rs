use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::groups::{Element, GroupKind};
use crate::measures::FiniteMeasure;

/// Header of a cached convolution power.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheHeader {
    pub group: String,
    pub measure: String,
    pub n: u64,
    pub epsilon: f64,
    pub deficit: f64,
}

const MAGIC: &str = "# walklab power v1";

/// Writes `header` and one `hex-element,weight` line per atom, through a
/// temporary file renamed into place.
pub fn write_power(path: &Path, header: &CacheHeader, mu: &FiniteMeasure) -> Result<()> {
    let io = |e: std::io::Error| Error::resource(format!("cannot write {}: {e}", path.display()));
    let mut body = String::with_capacity(32 * mu.len() + 256);
    body.push_str(MAGIC);
    body.push('\n');
    body.push_str(&format!("# group: {}\n", header.group));
    body.push_str(&format!("# measure: {}\n", header.measure));
    body.push_str(&format!("# n: {}\n", header.n));
    body.push_str(&format!("# epsilon: {:e}\n", header.epsilon));
    body.push_str(&format!("# deficit: {:e}\n", mu.deficit()));
    body.push_str("element,weight\n");
    for (g, w) in mu.atoms() {
        body.push_str(&g.to_hex());
        body.push(',');
        body.push_str(&format!("{w:e}\n"));
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(body.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn read_power(path: &Path) -> Result<(CacheHeader, FiniteMeasure)> {
    let text = fs::read_to_string(path).map_err(|e| Error::resource(format!("cannot read {}: {e}", path.display())))?;
    let bad = |why: &str| Error::parse(&path.display().to_string(), why.to_string());
    let mut lines = text.lines();
    if lines.next() != Some(MAGIC) {
        return Err(bad("not a cached power"));
    }
    let mut field = |name: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad("truncated header"))?;
        line.strip_prefix(&format!("# {name}: "))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("expected header field {name}")))
    };
    let group = field("group")?;
    let measure = field("measure")?;
    let n = field("n")?.parse().map_err(|_| bad("bad n"))?;
    let epsilon = field("epsilon")?.parse().map_err(|_| bad("bad epsilon"))?;
    let deficit: f64 = field("deficit")?.parse().map_err(|_| bad("bad deficit"))?;
    if lines.next() != Some("element,weight") {
        return Err(bad("missing column header"));
    }
    let kind: GroupKind = group.parse()?;
    let mut atoms = Vec::new();
    for line in lines {
        let (g, w) = line.split_once(',').ok_or_else(|| bad("expected element,weight"))?;
        let w: f64 = w.parse().map_err(|_| bad("bad weight"))?;
        atoms.push((Element::from_hex(g)?, w));
    }
    let header = CacheHeader { group, measure, n, epsilon, deficit };
    atoms.sort_by(|a, b| a.0.cmp(&b.0));
    if atoms.windows(2).any(|w| w[0].0 == w[1].0) || atoms.iter().any(|a| !(a.1 > 0.0) || !kind.contains(&a.0)) {
        return Err(bad("atoms must be distinct, positive and in the group"));
    }
    Ok((header, FiniteMeasure::from_parts(kind, atoms, deficit)))
}
