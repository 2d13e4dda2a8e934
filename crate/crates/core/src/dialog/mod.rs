//! Dialogue acts, the summary action space and masks, the turn-based episode
//! engine, rewards and transcripts.

mod acts;
mod episode;
mod reward;
mod space;
mod transcript;

pub use acts::{ActKind, SystemAct, UserAct, UserActKind};
pub use episode::{
    observed_constraints, run_episode, DialogueView, EpisodeFeedback, EpisodeRecord, EpisodeSetup, Policy, TurnRecord,
};
pub use reward::{compute_reward, decompose_reward, episode_return, SUCCESS_REWARD};
pub use space::{build_action_mask, ActionMask, ActionSpace, SummaryAction, OBSERVED_MASS_GATE};
pub use transcript::{read_transcript, write_transcript, TranscriptLine};
