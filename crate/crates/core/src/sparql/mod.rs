//! A SPARQL subset: PREFIX, SELECT, basic graph patterns, nested groups and
//! UNION, evaluated in a fixed order, plus five result serializations.

mod ast;
mod eval;
mod parser;
mod results;

pub use ast::{PatternGroup, Projection, QueryAst, TermPattern, TriplePattern, Variable};
pub use eval::{evaluate, Row, SolutionTable};
pub use parser::parse_query;
pub use results::{
    csv_cells, display_cell, read_csv, read_json, read_tsv, read_tsv_table, read_xml, render, tsv_cells, ResultFormat,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query syntax error at line {line}, column {column}: expected {expected}")]
    QuerySyntax { offset: usize, line: usize, column: usize, expected: String },
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("unsupported keyword {keyword} at line {line}, column {column}")]
    UnsupportedKeyword { keyword: String, line: usize, column: usize },
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
    #[error("invalid triple pattern: {0}")]
    BadPattern(&'static str),
    #[error("unknown result format {0:?} (expected text, csv, tsv, json or xml)")]
    UnknownFormat(String),
    #[error("malformed {format} results: {detail}")]
    MalformedResults { format: &'static str, detail: String },
}
