use super::EpisodeRecord;

/// Bonus for a dialogue that recommends a target item.
pub const SUCCESS_REWARD: i32 = 20;

/// 20·success − l
pub fn episode_return(success: bool, length: usize) -> i32 {
    SUCCESS_REWARD * i32::from(success) - length as i32
}

pub fn compute_reward<T>(record: &EpisodeRecord<T>) -> i32 {
    episode_return(record.success, record.length)
}

/// Per-turn rewards: −1 each turn, with the success bonus on the last turn.
pub fn decompose_reward(length: usize, success: bool) -> Vec<i32> {
    let mut out = vec![-1; length];
    if success {
        if let Some(last) = out.last_mut() {
            *last += SUCCESS_REWARD;
        }
    }
    out
}
