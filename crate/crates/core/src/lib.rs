//! Protocol state machine inference toolkit.
//!
//! The pipeline locates the state-machine module inside a protocol
//! implementation ([`filter`]), segments its sources into syntax-bounded
//! chunks ([`segment`]), embeds the chunks into a persisted vector index
//! ([`embed`]), and drives a chat backend ([`llm`]) through a staged,
//! retrieval-augmented inference that produces a finite state machine
//! ([`infer`]). The resulting model ([`fsm`]) can be validated,
//! determinized, diffed against other implementations, scored against a
//! ground truth ([`eval`]), and turned into seed message sequences for
//! stateful fuzzers ([`seeds`]).

pub mod embed;
pub mod eval;
pub mod filter;
pub mod fsm;
pub mod infer;
pub mod llm;
pub mod seeds;
pub mod segment;
pub(crate) mod util;
