//! Tri-level unit commitment and dispatch built as nested graphs.
//!
//! A day holds one day-ahead commitment (DA), eight short-term commitments
//! (ST) and 96 hour-ahead dispatch problems (HA) under the default
//! schedule. Each problem is a graph of time-point subgraphs whose nodes
//! are buses and lines; cross-layer couplings are edges of the day graph.
//!
//! Time is measured in ticks of the HA resolution (15 minutes by default),
//! relative to the start of the day. Negative ticks belong to the previous
//! day and are read from a [`DayBoundary`].

pub mod data;
mod day;
mod layers;
pub mod objective;
pub mod schedule;
mod timepoint;
pub mod toy;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;

pub use data::{
    Bus, Category, DataError, DemandData, GeneratorData, Line, NetworkData, ReserveScenario,
};
pub use day::{build_day_graph, build_day_graph_seq, DayBoundary, DayGraph, DayIndex, SubIndex};
pub use layers::{build_dauc, build_haed, build_stuc, Commitment, Link, Subproblem, Upstream};
pub use schedule::{LayerSchedule, Schedule};
pub use timepoint::{
    build_timepoint, BusVars, CommitVars, GenVars, LineVars, PointVars, TimePoint,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    Da,
    St,
    Ha,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Da, Layer::St, Layer::Ha];

    /// Label prefix of the layer's subproblem graphs.
    pub fn prefix(self) -> &'static str {
        match self {
            Layer::Da => "da",
            Layer::St => "st",
            Layer::Ha => "ha",
        }
    }

    /// Layer of a subproblem graph label: `da`, or `st`/`ha` followed by
    /// an index.
    pub fn from_label(label: &str) -> Option<Layer> {
        if label == "da" {
            return Some(Layer::Da);
        }
        [Layer::St, Layer::Ha].into_iter().find(|l| {
            label
                .strip_prefix(l.prefix())
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        })
    }

    pub fn is_commitment(self) -> bool {
        self != Layer::Ha
    }

    /// Whether generator category `c` has output variables in this layer.
    /// ST-committed units do not exist at the day-ahead level.
    pub fn dispatches(self, c: Category) -> bool {
        !(self == Layer::Da && c == Category::ShortTerm)
    }

    /// Whether this layer owns the commitment binaries of category `c`.
    pub fn commits(self, c: Category) -> bool {
        c.commit_layer() == Some(self)
    }
}

impl std::fmt::Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.prefix())
    }
}

#[derive(Debug, Error)]
pub enum PowerError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{layer}{index}: {message}")]
    Build {
        layer: Layer,
        index: usize,
        message: String,
    },
}
