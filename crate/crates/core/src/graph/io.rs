//! Edge-list and GML ingestion.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parses `u v [w]` lines. Blank lines and lines starting with `#` are
/// skipped; labels are indexed in order of first appearance and repeated
/// pairs (in either orientation) sum their weights.
pub fn load_edge_list<T: Scalar>(text: &str) -> Result<Graph<T>> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |label: &str| -> usize {
        if let Some(&i) = index.get(label) {
            return i;
        }
        index.insert(label.to_string(), labels.len());
        labels.push(label.to_string());
        labels.len() - 1
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let weight = match fields.len() {
            2 => 1.0,
            3 => parse_weight(fields[2], lineno + 1)?,
            k => {
                return Err(Error::parse(
                    lineno + 1,
                    format!("expected `u v [w]`, found {k} fields"),
                ))
            }
        };
        let u = intern(fields[0]);
        let v = intern(fields[1]);
        edges.push((u, v, T::of(weight)));
    }
    if labels.is_empty() {
        return Err(Error::parse(0, "edge list contains no edges"));
    }
    Graph::from_edges(labels, &edges)
}

fn parse_weight(field: &str, line: usize) -> Result<f64> {
    let w: f64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("weight {field:?} is not a number")))?;
    if !w.is_finite() {
        return Err(Error::parse(line, format!("weight {field:?} is not finite")));
    }
    if w < 0.0 {
        return Err(Error::parse(line, format!("weight {w} is negative")));
    }
    Ok(w)
}

/// Serialises a graph as an edge list, one `u v [w]` line per edge. The
/// weight column is omitted for unit weights.
pub fn write_edge_list<T: Scalar>(g: &Graph<T>) -> Result<String> {
    if let Some(l) = g.labels().iter().find(|l| l.is_empty() || l.contains(char::is_whitespace)) {
        return Err(Error::domain(format!(
            "label {l:?} cannot be written to a whitespace-separated edge list"
        )));
    }
    let mut out = String::new();
    for (u, v, w) in g.edges() {
        if w == T::one() {
            writeln!(out, "{} {}", g.label(u), g.label(v)).unwrap();
        } else {
            writeln!(out, "{} {} {}", g.label(u), g.label(v), w).unwrap();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Key(String),
    Num(f64),
    Str(String),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '[' => {
                out.push((Token::Open, line));
                chars.next();
            }
            ']' => {
                out.push((Token::Close, line));
                chars.next();
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\n') => {
                            line += 1;
                            s.push('\n');
                        }
                        Some(c) => s.push(c),
                        None => return Err(Error::parse(start, "unterminated string")),
                    }
                }
                out.push((Token::Str(s), start));
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' || c == '"' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                let tok = if word.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
                    Token::Key(word)
                } else {
                    let x = word
                        .parse::<f64>()
                        .map_err(|_| Error::parse(line, format!("unexpected token {word:?}")))?;
                    Token::Num(x)
                };
                out.push((tok, line));
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum Value {
    Num(f64),
    Str(String),
    List(Vec<(String, Value, usize)>),
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn last_line(&self) -> usize {
        self.tokens.last().map_or(0, |t| t.1)
    }

    /// Parses `key value` pairs until a closing bracket or end of input.
    fn list(&mut self, nested: bool) -> Result<Vec<(String, Value, usize)>> {
        let mut items = Vec::new();
        loop {
            let Some((tok, line)) = self.tokens.get(self.pos).cloned() else {
                if nested {
                    return Err(Error::parse(self.last_line(), "missing `]`"));
                }
                return Ok(items);
            };
            self.pos += 1;
            let key = match tok {
                Token::Close if nested => return Ok(items),
                Token::Key(k) => k,
                other => return Err(Error::parse(line, format!("expected a key, found {other:?}"))),
            };
            let Some((tok, vline)) = self.tokens.get(self.pos).cloned() else {
                return Err(Error::parse(line, format!("key {key:?} has no value")));
            };
            self.pos += 1;
            let value = match tok {
                Token::Num(x) => Value::Num(x),
                Token::Str(s) => Value::Str(s),
                Token::Open => Value::List(self.list(true)?),
                other => {
                    return Err(Error::parse(vline, format!("bad value for {key:?}: {other:?}")))
                }
            };
            items.push((key, value, line));
        }
    }
}

fn find_num(items: &[(String, Value, usize)], key: &str) -> Option<f64> {
    items.iter().find_map(|(k, v, _)| match v {
        Value::Num(x) if k == key => Some(*x),
        _ => None,
    })
}

fn as_id(x: f64, line: usize, what: &str) -> Result<i64> {
    if x.fract() != 0.0 || !x.is_finite() {
        return Err(Error::parse(line, format!("{what} {x} is not an integer")));
    }
    Ok(x as i64)
}

/// Parses the GML subset `graph [ node [ id N label "..." ] edge [ source N
/// target N value W ] ]`. Unknown keys, including nested lists, are skipped.
/// Node labels fall back to the numeric id when absent.
pub fn load_gml<T: Scalar>(text: &str) -> Result<Graph<T>> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let top = parser.list(false)?;
    let (graph_items, _) = top
        .into_iter()
        .find_map(|(k, v, line)| match v {
            Value::List(items) if k == "graph" => Some((items, line)),
            _ => None,
        })
        .ok_or_else(|| Error::parse(1, "no `graph [ ... ]` block"))?;

    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut raw_edges = Vec::new();
    for (key, value, line) in &graph_items {
        let Value::List(items) = value else { continue };
        match key.as_str() {
            "node" => {
                let id = find_num(items, "id")
                    .ok_or_else(|| Error::parse(*line, "node without `id`"))?;
                let id = as_id(id, *line, "node id")?;
                let label = items.iter().find_map(|(k, v, _)| match v {
                    Value::Str(s) if k == "label" => Some(s.clone()),
                    _ => None,
                });
                if ids.insert(id, labels.len()).is_some() {
                    return Err(Error::parse(*line, format!("node id {id} declared twice")));
                }
                labels.push(label.unwrap_or_else(|| id.to_string()));
            }
            "edge" => {
                let source = find_num(items, "source")
                    .ok_or_else(|| Error::parse(*line, "edge without `source`"))?;
                let target = find_num(items, "target")
                    .ok_or_else(|| Error::parse(*line, "edge without `target`"))?;
                let weight = find_num(items, "value").unwrap_or(1.0);
                if !weight.is_finite() || weight < 0.0 {
                    return Err(Error::parse(*line, format!("edge value {weight} is invalid")));
                }
                raw_edges.push((
                    as_id(source, *line, "source")?,
                    as_id(target, *line, "target")?,
                    weight,
                    *line,
                ));
            }
            _ => {}
        }
    }
    if labels.is_empty() {
        return Err(Error::parse(1, "graph declares no nodes"));
    }
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (s, t, w, line) in raw_edges {
        let lookup = |id: i64| {
            ids.get(&id)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("edge references undeclared node {id}")))
        };
        edges.push((lookup(s)?, lookup(t)?, T::of(w)));
    }
    Graph::from_edges(labels, &edges).map_err(|e| match e {
        Error::Domain(msg) => Error::parse(1, msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_edge_list() {
        let g: Graph = load_edge_list("a b\nb c").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.total_weight(), 2.0);
        assert_eq!(g.strengths(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.labels(), &["a", "b", "c"]);
    }

    #[test]
    fn duplicate_lines_sum() {
        let g: Graph = load_edge_list("a b 2.5\nb a 0.5").unwrap();
        assert_eq!(g.weight(0, 1), 3.0);
        assert_eq!(g.total_weight(), 3.0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let g: Graph = load_edge_list("# header\n\n  x y 2\n# trailing\n").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.total_weight(), 2.0);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let cases = [
            ("a b\nb", 2),
            ("a b c d", 1),
            ("a b\n\nb c heavy", 3),
            ("a b -1", 1),
            ("a b inf", 1),
        ];
        for (text, line) in cases {
            match load_edge_list::<f64>(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn empty_edge_list_rejected() {
        assert!(matches!(load_edge_list::<f64>("# nothing"), Err(Error::Parse { .. })));
    }

    #[test]
    fn minimal_gml() {
        let g: Graph = load_gml("graph [ node [ id 1 ] node [ id 2 ] edge [ source 1 target 2 ] ]")
            .unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.total_weight(), 1.0);
        assert_eq!(g.labels(), &["1", "2"]);
    }

    #[test]
    fn gml_labels_values_and_unknown_keys() {
        let text = r#"
            Creator "someone"
            graph [
              directed 0
              node [ id 0 label "Valjean" graphics [ x 1.0 y 2.0 ] ]
              node [ id 5 label "Javert" value 3 ]
              edge [ source 0 target 5 value 4 ]
              edge [ source 5 target 0 value 1.5 ]
            ]
        "#;
        let g: Graph = load_gml(text).unwrap();
        assert_eq!(g.labels(), &["Valjean", "Javert"]);
        assert_eq!(g.weight(0, 1), 5.5);
    }

    #[test]
    fn gml_errors() {
        let cases = [
            "graph [ node [ label \"x\" ] ]",
            "graph [ node [ id 1 ] edge [ source 1 ] ]",
            "graph [ node [ id 1 ] edge [ source 1 target 9 ] ]",
            "graph [ node [ id 1 ]",
            "nodes [ ]",
            "graph [ node [ id 1 ] node [ id 1 ] ]",
        ];
        for text in cases {
            assert!(matches!(load_gml::<f64>(text), Err(Error::Parse { .. })), "{text}");
        }
    }

    #[test]
    fn edge_list_roundtrip() {
        let g: Graph = load_edge_list("a b\nb c 2\nc c 0.5").unwrap();
        let text = write_edge_list(&g).unwrap();
        let h: Graph = load_edge_list(&text).unwrap();
        assert_eq!(h.adjacency(), g.adjacency());
        assert_eq!(h.labels(), g.labels());
    }

    #[test]
    fn whitespace_labels_cannot_be_written() {
        let g: Graph = load_gml(
            "graph [ node [ id 0 label \"a b\" ] node [ id 1 ] edge [ source 0 target 1 ] ]",
        )
        .unwrap();
        assert!(write_edge_list(&g).is_err());
    }
}
