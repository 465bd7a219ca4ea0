//! Classification tables of real forms, loaded from `data/real_forms.toml`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::InvolutionError;

const DATA: &str = include_str!("../../data/real_forms.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainType {
    #[serde(rename = "AIII")]
    AIII,
    #[serde(rename = "DIII")]
    DIII,
    #[serde(rename = "BDI_q2")]
    BdiQ2,
    #[serde(rename = "CI")]
    CI,
}

impl DomainType {
    pub const ALL: [DomainType; 4] = [DomainType::AIII, DomainType::DIII, DomainType::BdiQ2, DomainType::CI];

    /// Accepts `AIII`, `A III`, `a_iii`, `BDI`, `BDI_q2`, `BD I`, ...
    pub fn parse(s: &str) -> Result<DomainType, InvolutionError> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_uppercase();
        Ok(match key.as_str() {
            "AIII" => DomainType::AIII,
            "DIII" => DomainType::DIII,
            "BDI" | "BDIQ2" | "BDI(Q=2)" => DomainType::BdiQ2,
            "CI" => DomainType::CI,
            _ => return Err(InvolutionError::UnknownType(s.to_string())),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DomainType::AIII => "AIII",
            DomainType::DIII => "DIII",
            DomainType::BdiQ2 => "BDI_q2",
            DomainType::CI => "CI",
        }
    }
}

impl fmt::Display for DomainType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealFormTableEntry {
    pub domain_type: DomainType,
    pub label: String,
    pub dim: String,
    pub ambient: String,
    pub condition: String,
    predicate: String,
    pub symbols: Vec<String>,
}

impl RealFormTableEntry {
    /// The real forms joined the way the table prints them.
    pub fn symbols_joined(&self) -> String {
        self.symbols.join("; ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecursiveRealFormRow {
    pub index: usize,
    /// Chain family identifier used by the chain builder.
    pub family: String,
    pub type_name: String,
    pub hermitian_space: String,
    pub real_form: String,
    pub q_range: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Tables {
    appendix: Vec<RealFormTableEntry>,
    recursive: Vec<RecursiveRealFormRow>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| toml::from_str(DATA).expect("bundled real-form table parses"))
}

/// Every classification row in table order.
pub fn appendix_rows() -> &'static [RealFormTableEntry] {
    &tables().appendix
}

/// The five recursive real forms in table order.
pub fn recursive_rows() -> &'static [RecursiveRealFormRow] {
    &tables().recursive
}

/// Row `index` (1-based) of the recursive real-form table.
pub fn recursive_row(index: usize) -> Result<&'static RecursiveRealFormRow, InvolutionError> {
    recursive_rows()
        .iter()
        .find(|r| r.index == index)
        .ok_or_else(|| InvolutionError::InvalidParams(format!("no recursive real form with index {index}")))
}

/// Parameters of a lookup. Which fields are required depends on the type:
/// `p, q` for A III, `n` for D III and C I, `p` (and optionally `k`) for BD I.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LookupParams {
    pub p: Option<i64>,
    pub q: Option<i64>,
    pub n: Option<i64>,
    pub k: Option<i64>,
}

fn required(v: Option<i64>, name: &str, ty: DomainType) -> Result<i64, InvolutionError> {
    let v = v.ok_or_else(|| InvolutionError::InvalidParams(format!("{ty} needs parameter {name}")))?;
    if v < 1 {
        return Err(InvolutionError::InvalidParams(format!("{name} = {v} must be at least 1")));
    }
    Ok(v)
}

fn matches(predicate: &str, ty: DomainType, params: &LookupParams) -> Result<bool, InvolutionError> {
    let even = |x: i64| x % 2 == 0;
    Ok(match ty {
        DomainType::AIII => {
            let p = required(params.p, "p", ty)?;
            let q = required(params.q, "q", ty)?;
            if p > q {
                return Err(InvolutionError::InvalidParams(format!(
                    "A III is listed with p <= q, got p = {p}, q = {q}"
                )));
            }
            let unequal = (p == 1 && q == 1) || p < q;
            let equal = p == q && p > 1;
            match predicate {
                "aiii_lt_not_both_even" => unequal && !(even(p) && even(q)),
                "aiii_lt_both_even" => unequal && even(p) && even(q),
                "aiii_eq_odd" => equal && !even(p),
                "aiii_eq_even" => equal && even(p),
                _ => false,
            }
        }
        DomainType::DIII | DomainType::CI => {
            let n = required(params.n, "n", ty)?;
            match predicate {
                "n_odd" => !even(n),
                "n_even" => even(n),
                _ => false,
            }
        }
        DomainType::BdiQ2 => {
            let p = required(params.p, "p", ty)?;
            if let Some(k) = params.k {
                if k < 0 || k > p / 2 {
                    return Err(InvolutionError::InvalidParams(format!(
                        "need 0 <= k <= [p/2], got k = {k}, p = {p}"
                    )));
                }
            }
            predicate == "bdi_k"
        }
    })
}

/// All classification rows of `ty` whose parameter condition holds.
pub fn lookup_real_forms(
    ty: DomainType,
    params: &LookupParams,
) -> Result<Vec<&'static RealFormTableEntry>, InvolutionError> {
    let mut out = Vec::new();
    for row in appendix_rows().iter().filter(|r| r.domain_type == ty) {
        if matches(&row.predicate, ty, params)? {
            out.push(row);
        }
    }
    Ok(out)
}
