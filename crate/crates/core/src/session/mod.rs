//! Interaction-event logs of the blurred editor and the developer attention
//! derived from them.

mod derive;
mod error;
mod event;
mod interval;
pub mod log;
mod record;
mod timeline;
mod tracking;
mod validate;
mod window;

pub use derive::{derive_attention, replay, visible_time_ms, SessionReplayer};
pub use error::SessionError;
pub use event::{EventKind, InputSource, InteractionEvent};
pub use interval::{Interval, IntervalSet};
pub use record::{Label, SessionRecord, Validity, SESSION_FORMAT_VERSION};
pub use timeline::{build_timeline, VisibilityTimeline, BLUR_TIMEOUT_MS};
pub use tracking::{apply_edit, track_edits, LineToken, TrackingState};
pub use validate::EventValidator;
pub use window::{check_unblur_shape, compute_window, MAX_WINDOW, WINDOW_RADIUS};
