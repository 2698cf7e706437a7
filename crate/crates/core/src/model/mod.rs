//! The mesh decoder: configuration, initialization, forward/backward over a
//! hierarchy, and checkpoint persistence.

mod checkpoint;
mod decoder;
mod encoder;

pub use checkpoint::{
    load_checkpoint, load_checkpoint_file, save_checkpoint, save_checkpoint_file,
};
pub use decoder::{
    decoder_backward, decoder_forward, decoder_forward_cached, init_decoder, DecoderCache,
    DecoderConfig, DecoderGradients, DecoderParams,
};
pub(crate) use decoder::{trunk_backward, trunk_forward, trunk_operators};
pub use encoder::{AffineEncoder, AffineEncoderGrads};
