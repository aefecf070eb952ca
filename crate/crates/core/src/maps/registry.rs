use std::fmt;
use std::str::FromStr;

use super::{ConvexShapeMap, DiagramMap, MapError, Result, TraceDet};

/// A map selected by name: `tracedet:<d>` or `apw:<q>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapSpec {
    TraceDet(usize),
    Apw(usize),
}

impl MapSpec {
    pub fn build(&self) -> Result<Box<dyn DiagramMap>> {
        Ok(match *self {
            MapSpec::TraceDet(d) => Box::new(TraceDet::new(d)?),
            MapSpec::Apw(q) => Box::new(ConvexShapeMap::new(q)?),
        })
    }
}

impl FromStr for MapSpec {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || MapError::UnknownMap(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(unknown)?;
        let n: usize = arg.trim().parse().map_err(|_| unknown())?;
        match kind.trim() {
            "tracedet" if n >= 2 => Ok(MapSpec::TraceDet(n)),
            "apw" if n >= 1 => Ok(MapSpec::Apw(n)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::TraceDet(d) => write!(f, "tracedet:{d}"),
            MapSpec::Apw(q) => write!(f, "apw:{q}"),
        }
    }
}

/// Builds a map from its registry name.
pub fn parse_map(name: &str) -> Result<Box<dyn DiagramMap>> {
    name.parse::<MapSpec>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in ["tracedet:2", "tracedet:4", "apw:50"] {
            let spec: MapSpec = name.parse().unwrap();
            assert_eq!(spec.to_string(), name);
            assert_eq!(spec.build().unwrap().name(), name);
        }
    }

    #[test]
    fn bad_names() {
        for name in ["tracedet", "tracedet:1", "apw:0", "foo:3", "apw:x", ""] {
            assert!(matches!(name.parse::<MapSpec>(), Err(MapError::UnknownMap(_))), "{name}");
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(parse_map("tracedet:3").unwrap().dim(), 6);
        assert_eq!(parse_map("apw:50").unwrap().dim(), 51);
    }
}
