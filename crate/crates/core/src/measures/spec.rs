use std::fmt;
use std::str::FromStr;

use super::{
    ball_mixture, default_cutoff, lamplighter_switch, stable_like, subordinate, tail_rule_truncation, uniform_ball,
    FiniteMeasure, FourierSymbol, LineSymbol, SubordinatedSymbol,
};
use crate::convolution::default_epsilon;
use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::{Group, GroupKind};
use crate::scales::MomentScale;

/// A parsed measure description such as `ball:r=2` or
/// `subordinate:base=ball:r=1,a=0.5`.
///
/// Nested values may be wrapped in parentheses. Without them, a
/// `key=value` token whose key does not belong to the enclosing form is
/// appended to the previous value, so `switchwalk:base=stable:a=1,cutoff=50`
/// gives the cutoff to the stable law.
#[derive(Debug, Clone)]
pub enum MeasureSpec {
    Delta,
    Ball { r: u32 },
    Mixture { rho: MomentScale, k: usize },
    Stable { alpha: f64, cutoff: Option<u64> },
    Subordinate { base: Box<MeasureSpec>, a: f64, k: Option<u64> },
    SwitchWalk { base: Box<MeasureSpec> },
}

fn keys(head: &str) -> &'static [&'static str] {
    match head {
        "ball" => &["r"],
        "mixture" => &["rho", "K"],
        "stable" => &["a", "cutoff"],
        "subordinate" => &["base", "a", "K"],
        "switchwalk" => &["base"],
        _ => &[],
    }
}

/// Splits on commas outside parentheses.
fn top_level_tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if t.starts_with('(') && t.ends_with(')') {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = strip_parens(s);
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), r),
            None => (s, ""),
        };
        let allowed = keys(head);
        let mut params: Vec<(String, String)> = Vec::new();
        if !rest.trim().is_empty() {
            for tok in top_level_tokens(rest) {
                match tok.split_once('=') {
                    Some((k, v)) if allowed.contains(&k.trim()) => params.push((k.trim().to_string(), v.to_string())),
                    _ => match params.last_mut() {
                        Some((_, v)) => {
                            v.push(',');
                            v.push_str(tok);
                        }
                        None => return Err(Error::parse(s, format!("unexpected token '{tok}'"))),
                    },
                }
            }
        }
        let get = |k: &str| params.iter().find(|p| p.0 == k).map(|p| strip_parens(&p.1).to_string());
        let need = |k: &str| get(k).ok_or_else(|| Error::parse(s, format!("missing {k}=")));
        let num = |k: &str, v: String| -> Result<f64> {
            v.trim().parse().map_err(|_| Error::parse(s, format!("{k}={v} is not a number")))
        };
        let int = |k: &str, v: String| -> Result<u64> {
            let x = num(k, v.clone())?;
            if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
                Ok(x as u64)
            } else {
                Err(Error::parse(s, format!("{k}={v} is not a nonnegative integer")))
            }
        };
        let spec = match head {
            "delta" => MeasureSpec::Delta,
            "ball" => MeasureSpec::Ball { r: u32::try_from(int("r", need("r")?)?).map_err(|_| Error::parse(s, "radius too large"))? },
            "mixture" => MeasureSpec::Mixture {
                rho: need("rho")?.parse()?,
                k: get("K").map(|v| int("K", v)).transpose()?.map_or(defaults::MIXTURE_LEVELS, |k| k as usize),
            },
            "stable" => MeasureSpec::Stable {
                alpha: num("a", need("a")?)?,
                cutoff: get("cutoff").map(|v| int("cutoff", v)).transpose()?,
            },
            "subordinate" => MeasureSpec::Subordinate {
                base: Box::new(need("base")?.parse()?),
                a: num("a", need("a")?)?,
                k: get("K").map(|v| int("K", v)).transpose()?,
            },
            "switchwalk" => MeasureSpec::SwitchWalk { base: Box::new(need("base")?.parse()?) },
            other => return Err(Error::parse(s, format!("unknown measure '{other}'"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Delta => write!(f, "delta"),
            MeasureSpec::Ball { r } => write!(f, "ball:r={r}"),
            MeasureSpec::Mixture { rho, k } => write!(f, "mixture:rho=({rho}),K={k}"),
            MeasureSpec::Stable { alpha, cutoff: None } => write!(f, "stable:a={alpha}"),
            MeasureSpec::Stable { alpha, cutoff: Some(c) } => write!(f, "stable:a={alpha},cutoff={c}"),
            MeasureSpec::Subordinate { base, a, k } => {
                write!(f, "subordinate:base=({base}),a={a}")?;
                if let Some(k) = k {
                    write!(f, ",K={k}")?;
                }
                Ok(())
            }
            MeasureSpec::SwitchWalk { base } => write!(f, "switchwalk:base=({base})"),
        }
    }
}

impl MeasureSpec {
    /// Builds the measure on `group`.
    pub fn build(&self, group: &Group) -> Result<FiniteMeasure> {
        match self {
            MeasureSpec::Delta => FiniteMeasure::delta(group.kind(), group.identity()),
            MeasureSpec::Ball { r } => uniform_ball(group, *r),
            MeasureSpec::Mixture { rho, k } => ball_mixture(group, rho, *k).map(|p| p.0),
            MeasureSpec::Stable { alpha, cutoff } => match group.kind() {
                GroupKind::Lattice { d } => stable_like(d, *alpha, cutoff.unwrap_or_else(|| default_cutoff(d))),
                other => Err(Error::usage(format!("stable-like laws live on Z^d, not {other}"))),
            },
            MeasureSpec::Subordinate { base, a, k } => {
                let phi = base.build(group)?;
                let eps = default_epsilon(phi.len());
                subordinate(&phi, *a, *k, eps)
            }
            MeasureSpec::SwitchWalk { base } => match group.kind() {
                GroupKind::Lamplighter { d } => {
                    let lattice = Group::new(GroupKind::Lattice { d })?;
                    lamplighter_switch(&base.build(&lattice)?)
                }
                other => Err(Error::usage(format!("switch-walk measures live on lamplighters, not {other}"))),
            },
        }
    }

    /// A Fourier symbol for measures on `Z`, without forming convolution
    /// powers. Subordination uses the tail-rule truncation unless `K` is
    /// given. `None` for other groups.
    pub fn symbol(&self, group: &Group) -> Result<Option<Box<dyn FourierSymbol>>> {
        if group.kind() != (GroupKind::Lattice { d: 1 }) {
            return Ok(None);
        }
        Ok(Some(match self {
            MeasureSpec::Subordinate { base, a, k } => {
                let base = LineSymbol::new(&base.build(group)?)?.named(base.to_string());
                let k = k.unwrap_or_else(|| tail_rule_truncation(*a, defaults::SUBORDINATION_TAIL));
                Box::new(SubordinatedSymbol::new(base, *a, k)?)
            }
            other => Box::new(LineSymbol::new(&other.build(group)?)?.named(other.to_string())),
        }))
    }

    /// Whether the natural representation is heavy-tailed, so that return
    /// series on `Z` should go through the symbol.
    pub fn prefers_symbol(&self) -> bool {
        matches!(self, MeasureSpec::Stable { .. } | MeasureSpec::Subordinate { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Element;

    #[test]
    fn parses_the_documented_forms() {
        for (input, canonical) in [
            ("ball:r=2", "ball:r=2"),
            ("delta", "delta"),
            ("mixture:rho=power:1.0,K=5", "mixture:rho=(power:1),K=5"),
            ("stable:a=1.0,cutoff=100000", "stable:a=1,cutoff=100000"),
            ("subordinate:base=ball:r=1,a=0.5", "subordinate:base=(ball:r=1),a=0.5"),
            ("switchwalk:base=stable:a=1.0", "switchwalk:base=(stable:a=1)"),
            ("switchwalk:base=stable:a=1.0,cutoff=50", "switchwalk:base=(stable:a=1,cutoff=50)"),
            ("mixture:rho=explog:c=1,a=0.5,K=3", "mixture:rho=(explog:c=1,a=0.5),K=3"),
            ("subordinate:base=(stable:a=1,cutoff=20),a=0.5,K=100", "subordinate:base=(stable:a=1,cutoff=20),a=0.5,K=100"),
        ] {
            let spec: MeasureSpec = input.parse().unwrap();
            assert_eq!(spec.to_string(), canonical, "{input}");
            let again: MeasureSpec = canonical.parse().unwrap();
            assert_eq!(again.to_string(), canonical);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["ball", "ball:r=-1", "ball:r=x", "gauss:s=1", "subordinate:a=0.5", "stable:cutoff=10"] {
            assert!(bad.parse::<MeasureSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn builds_on_matching_groups() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let l = Group::new(GroupKind::Lamplighter { d: 1 }).unwrap();
        let ball: MeasureSpec = "ball:r=1".parse().unwrap();
        assert_eq!(ball.build(&z).unwrap().len(), 3);
        let sw: MeasureSpec = "switchwalk:base=ball:r=1".parse().unwrap();
        let q = sw.build(&l).unwrap();
        assert_eq!(q.weight(&Element::lamplighter(&[], &[0])), 1.0 / 6.0);
        assert!(sw.build(&z).is_err());
        let st: MeasureSpec = "stable:a=1,cutoff=10".parse().unwrap();
        assert!(st.build(&l).is_err());
        assert_eq!("delta".parse::<MeasureSpec>().unwrap().build(&l).unwrap().len(), 1);
        assert!(st.symbol(&z).unwrap().is_some() && st.symbol(&l).unwrap().is_none());
    }
}
