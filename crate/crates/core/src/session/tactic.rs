use std::collections::BTreeSet;
use std::fmt;

use crate::parser::{parse_formula_in, parse_formula_list_in, ParseError};
use crate::syntax::{mk_wf, Preformula, Var, WellFormednessError, WfFormula};

/// A backward proof step. Each variant reads one rule bottom-up, except
/// `Undo` and `Qed` which are session bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tactic<F = WfFormula> {
    Assumption,
    Intro,
    Raa,
    NotI,
    FfI(F),
    FfE,
    ImpE(F),
    BoxI,
    KRule(F),
    MuI,
    MuE(F),
    Weaken(Vec<F>),
    Undo,
    Qed,
}

impl<F> Tactic<F> {
    /// Canonical script keyword.
    pub fn keyword(&self) -> &'static str {
        match self {
            Tactic::Assumption => "assumption",
            Tactic::Intro => "intro",
            Tactic::Raa => "raa",
            Tactic::NotI => "not_I",
            Tactic::FfI(_) => "ff_I",
            Tactic::FfE => "ff_E",
            Tactic::ImpE(_) => "imp_E",
            Tactic::BoxI => "box_I",
            Tactic::KRule(_) => "K",
            Tactic::MuI => "mu_I",
            Tactic::MuE(_) => "mu_E",
            Tactic::Weaken(_) => "weaken",
            Tactic::Undo => "undo",
            Tactic::Qed => "qed",
        }
    }

    pub fn needs_formula(&self) -> bool {
        matches!(
            self,
            Tactic::FfI(_) | Tactic::ImpE(_) | Tactic::KRule(_) | Tactic::MuE(_) | Tactic::Weaken(_)
        )
    }

    fn map<G, E>(self, f: impl Fn(F) -> Result<G, E>) -> Result<Tactic<G>, E> {
        Ok(match self {
            Tactic::Assumption => Tactic::Assumption,
            Tactic::Intro => Tactic::Intro,
            Tactic::Raa => Tactic::Raa,
            Tactic::NotI => Tactic::NotI,
            Tactic::FfI(a) => Tactic::FfI(f(a)?),
            Tactic::FfE => Tactic::FfE,
            Tactic::ImpE(a) => Tactic::ImpE(f(a)?),
            Tactic::BoxI => Tactic::BoxI,
            Tactic::KRule(a) => Tactic::KRule(f(a)?),
            Tactic::MuI => Tactic::MuI,
            Tactic::MuE(a) => Tactic::MuE(f(a)?),
            Tactic::Weaken(v) => Tactic::Weaken(v.into_iter().map(f).collect::<Result<_, _>>()?),
            Tactic::Undo => Tactic::Undo,
            Tactic::Qed => Tactic::Qed,
        })
    }
}

impl Tactic<Preformula> {
    /// Runs every formula parameter through `mk_wf`.
    pub fn checked(self) -> Result<Tactic<WfFormula>, WellFormednessError> {
        self.map(mk_wf)
    }
}

impl From<Tactic<WfFormula>> for Tactic<Preformula> {
    fn from(t: Tactic<WfFormula>) -> Self {
        t.map(|f| Ok::<_, std::convert::Infallible>(f.into_inner()))
            .unwrap_or_else(|e| match e {})
    }
}

impl<F: fmt::Display> fmt::Display for Tactic<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())?;
        match self {
            Tactic::FfI(a) | Tactic::ImpE(a) | Tactic::KRule(a) | Tactic::MuE(a) => write!(f, " {a}"),
            Tactic::Weaken(v) => {
                let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                if parts.is_empty() {
                    Ok(())
                } else {
                    write!(f, " {}", parts.join(", "))
                }
            }
            _ => Ok(()),
        }
    }
}

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

/// Every tactic name accepted by [`parse_tactic`], canonical spelling first.
pub const TACTIC_NAMES: [&str; 14] = [
    "assumption", "intro", "raa", "not_I", "ff_I", "ff_E", "imp_E", "box_I", "K", "mu_I", "mu_E",
    "weaken", "undo", "qed",
];

/// Parses one tactic from `src[start..end]`: a name, then an optional
/// formula argument. Names are matched ignoring case and underscores, so
/// `mu_I`, `MuI` and `mui` are the same tactic. A trailing `.` is ignored.
pub(crate) fn parse_tactic_in(
    src: &str,
    start: usize,
    end: usize,
    vars: &BTreeSet<Var>,
) -> Result<Tactic<Preformula>, ParseError> {
    let mut end = end;
    let trimmed = src[start..end].trim_end();
    end = start + trimmed.len();
    if trimmed.ends_with('.') {
        end -= 1;
    }
    let text = &src[start..end];
    let lead = text.len() - text.trim_start().len();
    let name_start = start + lead;
    let name_len = src[name_start..end]
        .find(char::is_whitespace)
        .unwrap_or(end - name_start);
    let name_end = name_start + name_len;
    let name = &src[name_start..name_end];
    let arg_start = name_end;
    let has_arg = !src[arg_start..end].trim().is_empty();

    let formula = || parse_formula_in(src, arg_start, end, vars);
    let no_arg = |t: Tactic<Preformula>| {
        if has_arg {
            let s = arg_start + (src[arg_start..end].len() - src[arg_start..end].trim_start().len());
            Err(ParseError::new(src, s, end, "end of line", "an argument"))
        } else {
            Ok(t)
        }
    };
    let needs_arg = |t: fn(Preformula) -> Tactic<Preformula>| {
        if has_arg {
            formula().map(t)
        } else {
            Err(ParseError::new(src, end, end, "a formula argument", "end of line"))
        }
    };
    match normalize(name).as_str() {
        "assumption" | "hyp" | "exact" => no_arg(Tactic::Assumption),
        "intro" | "intros" | "impi" => no_arg(Tactic::Intro),
        "raa" => no_arg(Tactic::Raa),
        "noti" => no_arg(Tactic::NotI),
        "ffi" => needs_arg(Tactic::FfI),
        "ffe" => no_arg(Tactic::FfE),
        "impe" => needs_arg(Tactic::ImpE),
        "boxi" => no_arg(Tactic::BoxI),
        "k" | "krule" => needs_arg(Tactic::KRule),
        "mui" => no_arg(Tactic::MuI),
        "mue" => needs_arg(Tactic::MuE),
        "weaken" => parse_formula_list_in(src, arg_start, end, vars).map(Tactic::Weaken),
        "undo" => no_arg(Tactic::Undo),
        "qed" => no_arg(Tactic::Qed),
        _ => Err(ParseError::expecting(
            src,
            name_start,
            name_end,
            &TACTIC_NAMES,
            &format!("`{name}`"),
        )),
    }
}

/// Parses a single tactic such as `mu_E mu x . A -> x`.
pub fn parse_tactic(text: &str, vars: &BTreeSet<Var>) -> Result<Tactic<Preformula>, ParseError> {
    parse_tactic_in(text, 0, text.len(), vars)
}
