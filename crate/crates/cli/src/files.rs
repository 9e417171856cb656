use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use markov_stability::{load_edge_list, load_gml, Graph, Partition};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    /// GML when the file name ends in `.gml`, edge list otherwise.
    Auto,
    Gml,
    Edges,
}

pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

pub fn read_input(path: &Path) -> Result<Input, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let sha256 = hex(&Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Parse(format!("{}: input is not valid UTF-8", path.display())))?;
    Ok(Input {
        path: path.to_path_buf(),
        text,
        sha256,
    })
}

pub fn load_graph(input: &Input, format: InputFormat) -> Result<Graph, CliError> {
    let gml = match format {
        InputFormat::Gml => true,
        InputFormat::Edges => false,
        InputFormat::Auto => input
            .path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("gml")),
    };
    let g = if gml {
        load_gml(&input.text)
    } else {
        load_edge_list(&input.text)
    };
    g.map_err(|e| CliError::lib_in(&input.path, e))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Writes `body` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// Writes a JSON side document to `path`, or to stderr when no path is given.
pub fn write_side_json(path: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

/// `path` with `suffix` appended to its file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn format_partition(g: &Graph, p: &Partition) -> String {
    let mut s = String::new();
    for (label, c) in g.labels().iter().zip(p.assignment()) {
        let _ = writeln!(s, "{label}\t{c}");
    }
    s
}

/// A partition file: labels in file order and the community id of each.
pub struct PartitionFile {
    pub labels: Vec<String>,
    pub communities: Vec<String>,
}

/// Reads `label<TAB>community` lines. Lines without a tab split on the last
/// run of whitespace. Blank lines and `#` comments are skipped.
pub fn read_partition(path: &Path) -> Result<PartitionFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut labels = Vec::new();
    let mut communities = Vec::new();
    let mut seen = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let split = line
            .rsplit_once('\t')
            .or_else(|| line.trim().rsplit_once(char::is_whitespace));
        let Some((label, community)) = split else {
            return Err(CliError::Parse(format!(
                "{}: line {}: expected `label<TAB>community`",
                path.display(),
                lineno + 1
            )));
        };
        let (label, community) = (label.trim(), community.trim());
        if label.is_empty() || community.is_empty() {
            return Err(CliError::Parse(format!(
                "{}: line {}: empty label or community",
                path.display(),
                lineno + 1
            )));
        }
        if let Some(first) = seen.insert(label.to_string(), lineno + 1) {
            return Err(CliError::Parse(format!(
                "{}: line {}: label {label:?} already assigned on line {first}",
                path.display(),
                lineno + 1
            )));
        }
        labels.push(label.to_string());
        communities.push(community.to_string());
    }
    if labels.is_empty() {
        return Err(CliError::Parse(format!("{}: no assignments", path.display())));
    }
    Ok(PartitionFile { labels, communities })
}

/// Aligns two partition files on their labels (in the order of `a`).
pub fn align(a: &PartitionFile, b: &PartitionFile) -> Result<(Partition, Partition), CliError> {
    let index: HashMap<&str, usize> = b.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let in_a: BTreeSet<&str> = a.labels.iter().map(String::as_str).collect();
    let only_a: Vec<&str> = a.labels.iter().map(String::as_str).filter(|l| !index.contains_key(l)).collect();
    let only_b: Vec<&str> = b.labels.iter().map(String::as_str).filter(|l| !in_a.contains(l)).collect();
    if !only_a.is_empty() || !only_b.is_empty() {
        let mut msg = String::from("partition files cover different labels");
        if !only_a.is_empty() {
            let _ = write!(msg, "; only in first: {}", only_a.join(", "));
        }
        if !only_b.is_empty() {
            let _ = write!(msg, "; only in second: {}", only_b.join(", "));
        }
        return Err(CliError::Domain(msg));
    }
    let pa = Partition::from_labels(&a.communities);
    let b_aligned: Vec<&str> = a.labels.iter().map(|l| b.communities[index[l.as_str()]].as_str()).collect();
    let pb = Partition::from_labels(&b_aligned);
    Ok((pa, pb))
}
