use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VkfError};
use crate::railway::{sleeper_track, wheel_order_track, SpeedProfile, TrackGeometry, WheelGeometry};
use crate::vkf::FrequencyTrack;

/// What an extracted order represents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum OrderLabel {
    Wheel(usize),
    Sleeper,
    /// A column of a frequency file.
    Column(String),
}

impl fmt::Display for OrderLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderLabel::Wheel(l) => write!(f, "wheel:{l}"),
            OrderLabel::Sleeper => write!(f, "sleeper"),
            OrderLabel::Column(c) => write!(f, "column:{c}"),
        }
    }
}

impl From<OrderLabel> for String {
    fn from(l: OrderLabel) -> Self {
        l.to_string()
    }
}

impl TryFrom<String> for OrderLabel {
    type Error = VkfError;

    fn try_from(s: String) -> Result<Self> {
        if let Some(c) = s.strip_prefix("column:") {
            return Ok(OrderLabel::Column(c.to_string()));
        }
        let mut v = parse_order_list(&s)?;
        if v.len() != 1 {
            return Err(VkfError::InvalidInput(format!("`{s}` names more than one order")));
        }
        Ok(v.remove(0))
    }
}

/// Parses `wheel:1..11,sleeper` style lists; ranges are inclusive.
pub fn parse_order_list(spec: &str) -> Result<Vec<OrderLabel>> {
    let bad = |item: &str| VkfError::InvalidInput(format!("cannot parse order `{item}`"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item == "sleeper" {
            out.push(OrderLabel::Sleeper);
            continue;
        }
        let rest = item.strip_prefix("wheel:").ok_or_else(|| bad(item))?;
        let (lo, hi) = match rest.split_once("..") {
            Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
            None => (rest, rest),
        };
        let lo = usize::from_str(lo.trim()).map_err(|_| bad(item))?;
        let hi = usize::from_str(hi.trim()).map_err(|_| bad(item))?;
        if lo == 0 || hi < lo {
            return Err(bad(item));
        }
        out.extend((lo..=hi).map(OrderLabel::Wheel));
    }
    if out.is_empty() {
        return Err(VkfError::InvalidInput("empty order list".into()));
    }
    Ok(out)
}

/// Frequency track of a railway order label.
pub fn railway_track(
    label: &OrderLabel,
    speed: &SpeedProfile,
    wheel: &WheelGeometry,
    track: &TrackGeometry,
) -> Result<FrequencyTrack> {
    match label {
        OrderLabel::Wheel(l) => wheel_order_track(speed, *l, wheel),
        OrderLabel::Sleeper => sleeper_track(speed, wheel, track),
        OrderLabel::Column(c) => Err(VkfError::InvalidInput(format!(
            "`{c}` is a frequency-file column, not a railway order"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ranges_and_sleeper() {
        let v = parse_order_list("wheel:1..3, sleeper,wheel:7").unwrap();
        assert_eq!(
            v,
            vec![
                OrderLabel::Wheel(1),
                OrderLabel::Wheel(2),
                OrderLabel::Wheel(3),
                OrderLabel::Sleeper,
                OrderLabel::Wheel(7)
            ]
        );
        assert_eq!(parse_order_list("wheel:1..11").unwrap().len(), 11);
    }

    #[test]
    fn rejects_malformed_items() {
        for s in ["", "wheel:0", "wheel:3..1", "axle:1", "wheel:x"] {
            assert!(parse_order_list(s).is_err(), "{s}");
        }
    }

    #[test]
    fn labels_round_trip_through_strings() {
        for l in [OrderLabel::Wheel(4), OrderLabel::Sleeper, OrderLabel::Column("f2".into())] {
            assert_eq!(OrderLabel::try_from(l.to_string()).unwrap(), l);
        }
    }
}
