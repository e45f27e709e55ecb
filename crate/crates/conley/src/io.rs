//! Input parsers, result serialisation, and the file grammars.
//!
//! Both formats are plain line-oriented text: one declaration per line,
//! blank lines and `#` comments ignored, tokens split on whitespace.
//!
//! Graded complex (`.cplx`):
//!
//! ```text
//! field 2
//! poset a b c            # elements, declaration order fixes tie-breaking
//! relation a b           # a <= b; any generating set, closure is taken
//! generator x 0 a        # id, dimension, grade
//! boundary y : x + 2*z   # sparse boundary of y; omitted means zero
//! ```
//!
//! Simplicial filtration (`.flt`):
//!
//! ```text
//! field 2
//! poset 0 1
//! relation 0 1
//! simplex u : 0          # vertices, then the filter value
//! simplex u w : 1        # id is the concatenation of the vertex labels
//! ```
//!
//! Every face of a listed simplex must be listed and the filter must be
//! monotone. Boundary signs follow the sorted orientation, adjusted by the
//! parity of the declared vertex order; over characteristic 2 they all
//! collapse to 1.

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{ComplexError, Generator, GradedComplex, ValidationReport};
use crate::connect::ConleyComplex;
use crate::field::{FieldError, PrimeField};
use crate::poset::{Poset, PosetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown id `{id}`")]
    UnknownId { line: usize, id: String },
    #[error("line {line}: face `{face}` of simplex `{simplex}` is not listed")]
    MissingFace {
        line: usize,
        simplex: String,
        face: String,
    },
    #[error(
        "line {line}: filter is not monotone: `{simplex}` at `{grade}` has face `{face}` at `{face_grade}`"
    )]
    NonMonotone {
        line: usize,
        simplex: String,
        grade: String,
        face: String,
        face_grade: String,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("complex fails validation: {0}")]
    Invalid(ValidationReport),
}

fn err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Syntax {
        line,
        message: message.into(),
    }
}

/// Lines with content: `(1-based number, text before any comment)`.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

struct Header {
    field: PrimeField,
    poset: Poset,
}

/// Parses the `field` / `poset` / `relation` declarations shared by both
/// formats. An explicit `field_override` wins over the file header.
fn parse_header(text: &str, field_override: Option<u64>) -> Result<Header, IoError> {
    let mut characteristic: Option<u64> = None;
    let mut elements: Vec<String> = Vec::new();
    let mut relations: Vec<(String, String)> = Vec::new();
    for (line, content) in content_lines(text) {
        let mut tokens = content.split_whitespace();
        match tokens.next().unwrap() {
            "field" => {
                let value = tokens
                    .next()
                    .ok_or_else(|| err(line, "`field` needs a characteristic"))?;
                if tokens.next().is_some() {
                    return Err(err(line, "`field` takes a single number"));
                }
                let p: u64 = value
                    .parse()
                    .map_err(|_| err(line, format!("`{value}` is not a number")))?;
                if characteristic.replace(p).is_some() {
                    return Err(err(line, "`field` declared twice"));
                }
            }
            "poset" => elements.extend(tokens.map(str::to_owned)),
            "relation" => {
                let a = tokens
                    .next()
                    .ok_or_else(|| err(line, "`relation` needs two elements"))?;
                let b = tokens
                    .next()
                    .ok_or_else(|| err(line, "`relation` needs two elements"))?;
                if tokens.next().is_some() {
                    return Err(err(line, "`relation` takes exactly two elements"));
                }
                relations.push((a.to_owned(), b.to_owned()));
            }
            "generator" | "boundary" | "simplex" => {}
            other => return Err(err(line, format!("unknown declaration `{other}`"))),
        }
    }
    let p = field_override.or(characteristic).unwrap_or(2);
    Ok(Header {
        field: PrimeField::new(p)?,
        poset: Poset::new(&elements, &relations)?,
    })
}

/// Parses a coefficient expression `term (+|- term)*` with
/// `term = [coeff*]id`, or the single token `0` for the zero chain.
fn parse_expression(line: usize, text: &str) -> Result<Vec<(String, i64)>, IoError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() || tokens == ["0"] {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut sign = 1i64;
    let mut expect_term = true;
    for token in tokens {
        if expect_term {
            let (coeff, id) = match token.split_once('*') {
                Some((c, id)) => {
                    let c: i64 = c
                        .parse()
                        .map_err(|_| err(line, format!("bad coefficient `{c}`")))?;
                    (c, id)
                }
                None => (1, token),
            };
            if id.is_empty() || id.parse::<i64>().is_ok() {
                return Err(err(line, format!("expected an id, found `{token}`")));
            }
            terms.push((id.to_owned(), sign * coeff));
            expect_term = false;
        } else {
            sign = match token {
                "+" => 1,
                "-" => -1,
                other => return Err(err(line, format!("expected + or -, found `{other}`"))),
            };
            expect_term = true;
        }
    }
    if expect_term {
        return Err(err(line, "expression ends with an operator"));
    }
    Ok(terms)
}

/// Parses a graded-complex file into a validated complex.
pub fn parse_complex(text: &str) -> Result<GradedComplex, IoError> {
    parse_complex_opts(text, None)
}

pub fn parse_complex_opts(
    text: &str,
    field_override: Option<u64>,
) -> Result<GradedComplex, IoError> {
    let header = parse_header(text, field_override)?;
    let mut generators: Vec<Generator> = Vec::new();
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut boundaries: Vec<(String, Vec<(String, i64)>)> = Vec::new();
    for (line, content) in content_lines(text) {
        let mut tokens = content.split_whitespace();
        match tokens.next().unwrap() {
            "generator" => {
                let id = tokens
                    .next()
                    .ok_or_else(|| err(line, "`generator` needs id, dimension, grade"))?;
                let dim = tokens
                    .next()
                    .ok_or_else(|| err(line, "`generator` needs a dimension"))?;
                let grade = tokens
                    .next()
                    .ok_or_else(|| err(line, "`generator` needs a grade"))?;
                if tokens.next().is_some() {
                    return Err(err(line, "`generator` takes id, dimension, grade"));
                }
                let dim: i32 = dim
                    .parse()
                    .map_err(|_| err(line, format!("`{dim}` is not a dimension")))?;
                let grade = header.poset.index_of(grade)?;
                if declared.insert(id.to_owned(), line).is_some() {
                    return Err(err(line, format!("generator `{id}` declared twice")));
                }
                generators.push(Generator::new(id, dim, grade));
            }
            "boundary" => {
                let rest = content.strip_prefix("boundary").unwrap();
                let (id_part, expr) = rest
                    .split_once(':')
                    .ok_or_else(|| err(line, "`boundary` needs `id : expression`"))?;
                let id = id_part.trim();
                if id.is_empty() || id.split_whitespace().count() != 1 {
                    return Err(err(line, "`boundary` needs a single id before `:`"));
                }
                if !declared.contains_key(id) {
                    return Err(IoError::UnknownId {
                        line,
                        id: id.to_owned(),
                    });
                }
                let terms = parse_expression(line, expr)?;
                for (ref_id, _) in &terms {
                    if !declared.contains_key(ref_id) {
                        return Err(IoError::UnknownId {
                            line,
                            id: ref_id.clone(),
                        });
                    }
                }
                boundaries.push((id.to_owned(), terms));
            }
            _ => {}
        }
    }
    let cx = GradedComplex::new(header.poset, header.field, generators, boundaries)?;
    let report = cx.validate();
    if !report.is_valid() {
        return Err(IoError::Invalid(report));
    }
    Ok(cx)
}

/// Parses a simplicial filtration into a validated complex, with standard
/// alternating boundary signs (trivial over characteristic 2).
pub fn parse_filtration(text: &str) -> Result<GradedComplex, IoError> {
    parse_filtration_opts(text, None)
}

pub fn parse_filtration_opts(
    text: &str,
    field_override: Option<u64>,
) -> Result<GradedComplex, IoError> {
    let header = parse_header(text, field_override)?;

    struct Simplex {
        line: usize,
        id: String,
        vertices: Vec<String>,
        sorted: Vec<String>,
        sign: i64,
        grade: usize,
    }

    let mut simplices: Vec<Simplex> = Vec::new();
    let mut by_key: HashMap<Vec<String>, usize> = HashMap::new();
    for (line, content) in content_lines(text) {
        let Some(rest) = content.strip_prefix("simplex") else {
            continue;
        };
        let (verts_part, grade_part) = rest
            .split_once(':')
            .ok_or_else(|| err(line, "`simplex` needs `vertices : grade`"))?;
        let vertices: Vec<String> = verts_part.split_whitespace().map(str::to_owned).collect();
        if vertices.is_empty() {
            return Err(err(line, "`simplex` needs at least one vertex"));
        }
        let grade_label = grade_part.trim();
        if grade_label.is_empty() || grade_label.split_whitespace().count() != 1 {
            return Err(err(line, "`simplex` needs a single grade after `:`"));
        }
        let grade = header.poset.index_of(grade_label)?;
        let mut sorted = vertices.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != vertices.len() {
            return Err(err(line, "simplex has a repeated vertex"));
        }
        let sign = permutation_sign(&vertices, &sorted);
        let id: String = vertices.concat();
        let index = simplices.len();
        if by_key.insert(sorted.clone(), index).is_some() {
            return Err(err(line, format!("simplex `{id}` listed twice")));
        }
        simplices.push(Simplex {
            line,
            id,
            vertices,
            sorted,
            sign,
            grade,
        });
    }

    let mut generators = Vec::with_capacity(simplices.len());
    let mut boundaries = Vec::new();
    for s in &simplices {
        generators.push(Generator::new(
            s.id.clone(),
            s.vertices.len() as i32 - 1,
            s.grade,
        ));
        if s.sorted.len() == 1 {
            continue;
        }
        let mut terms = Vec::with_capacity(s.sorted.len());
        for omit in 0..s.sorted.len() {
            let mut face: Vec<String> = s.sorted.clone();
            face.remove(omit);
            let Some(&fi) = by_key.get(&face) else {
                return Err(IoError::MissingFace {
                    line: s.line,
                    simplex: s.id.clone(),
                    face: face.join(""),
                });
            };
            let f = &simplices[fi];
            if !header.poset.leq(f.grade, s.grade) {
                return Err(IoError::NonMonotone {
                    line: s.line,
                    simplex: s.id.clone(),
                    grade: header.poset.label(s.grade).to_owned(),
                    face: f.id.clone(),
                    face_grade: header.poset.label(f.grade).to_owned(),
                });
            }
            let sign = s.sign * (if omit % 2 == 0 { 1 } else { -1 }) * f.sign;
            terms.push((f.id.clone(), sign));
        }
        boundaries.push((s.id.clone(), terms));
    }

    let cx = GradedComplex::new(header.poset, header.field, generators, boundaries)?;
    let report = cx.validate();
    if !report.is_valid() {
        return Err(IoError::Invalid(report));
    }
    Ok(cx)
}

/// Sign of the permutation taking `sorted` to `declared`.
fn permutation_sign(declared: &[String], sorted: &[String]) -> i64 {
    let mut perm: Vec<usize> = declared
        .iter()
        .map(|v| sorted.iter().position(|s| s == v).unwrap())
        .collect();
    let mut sign = 1i64;
    for i in 0..perm.len() {
        while perm[i] != i {
            let j = perm[i];
            perm.swap(i, j);
            sign = -sign;
        }
    }
    sign
}

/// True when the text looks like a filtration file.
pub fn looks_like_filtration(text: &str) -> bool {
    content_lines(text).any(|(_, l)| l.starts_with("simplex"))
}

/// Parses either format, deciding by content.
pub fn parse_auto(text: &str, field_override: Option<u64>) -> Result<GradedComplex, IoError> {
    if looks_like_filtration(text) {
        parse_filtration_opts(text, field_override)
    } else {
        parse_complex_opts(text, field_override)
    }
}

fn format_chain(chain: &crate::complex::SparseColumn, name_of: impl Fn(u32) -> String) -> String {
    if chain.is_zero() {
        return "0".to_owned();
    }
    chain
        .iter()
        .map(|(pos, c)| {
            let id = name_of(pos);
            if c == 1 {
                id
            } else {
                format!("{c}*{id}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Serialises a Conley complex as a graded-complex file: the index
/// generators with their representative chains (as comments), and the
/// connection matrix as boundary expressions. The output parses back
/// through [`parse_complex`] and recomputes to itself.
pub fn serialize_result(conley: &ConleyComplex, original: Option<&GradedComplex>) -> String {
    let poset = conley.poset();
    let mut out = String::new();
    out.push_str("# conley complex / connection matrix\n");
    out.push_str(&format!("field {}\n", conley.field().characteristic()));
    if !poset.is_empty() {
        out.push_str("poset");
        for label in poset.labels() {
            out.push_str(&format!(" {label}"));
        }
        out.push('\n');
    }
    for (a, b) in poset.covers() {
        out.push_str(&format!("relation {} {}\n", poset.label(a), poset.label(b)));
    }
    for ((grade, dim), count) in conley.index_dims() {
        out.push_str(&format!(
            "# index grade={} dim={} count={}\n",
            poset.label(grade),
            dim,
            count
        ));
    }
    for gen in conley.index_generators() {
        out.push_str(&format!(
            "generator {} {} {}\n",
            gen.id,
            gen.dim,
            poset.label(gen.grade)
        ));
        if let Some(cx) = original {
            out.push_str(&format!(
                "# chain {} = {}\n",
                gen.id,
                format_chain(&gen.chain, |p| cx.generator(p).id.clone())
            ));
        }
    }
    for (j, col) in conley.delta().iter().enumerate() {
        if col.is_zero() {
            continue;
        }
        out.push_str(&format!(
            "boundary {} : {}\n",
            conley.index_generators()[j].id,
            format_chain(col, |p| conley.index_generators()[p as usize].id.clone())
        ));
    }
    out
}
