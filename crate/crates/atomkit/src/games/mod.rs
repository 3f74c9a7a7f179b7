//! Game deciders: the atomic Ehrenfeucht-Fraisse game on relational atom
//! structures and the bounded pebbled network game on cylindric atom
//! structures, both by exhaustive search with replayable certificates.

pub mod ef;
pub mod network;
pub mod rel_structure;

pub use ef::{
    ef_best_response, ef_decide, ef_move_valid, ef_partition_strategy_response,
    ef_winning_challenge, partition_closed_form,
    partition_strategy_survives, verify_ef_outcome, EfMove, GameOutcome, PvStep, Side,
    StrategyResponse,
};
pub use network::{
    classify, dead_end_structure, network_game_decide, verify_net_outcome, ClassifyCertificate,
    NetMove, NetOutcome, NetPvStep, NetResponse, NetworkState,
};
pub use rel_structure::{Relation, RelStructure};

/// The reported winner of a bounded game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Exists,
    ForAll,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Winner::Exists => write!(f, "Exists"),
            Winner::ForAll => write!(f, "ForAll"),
        }
    }
}
