//! Losses, optimizer, synthetic data, and the training loop.

mod adam;
mod loss;
mod synthetic;
mod trainer;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use loss::{l1_loss, smooth_loss, total_loss, LossBreakdown, LossConfig};
pub use synthetic::{generate_synthetic, Sample, SyntheticDataset, SyntheticSpec};
pub use trainer::{
    evaluate_mean_losses, train_decoder, train_decoder_observed, write_history_csv, EpochStats,
    NormMode, TrainConfig, TrainOutcome,
};
