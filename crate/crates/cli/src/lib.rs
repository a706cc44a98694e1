//! Batch commands and the session server behind the `muwb` binary.
//!
//! Every command returns a [`Report`]: plain text, a structured JSON
//! rendering with stable field names, and an exit status.

pub mod check;
pub mod input;
pub mod mc;
pub mod serve;
pub mod soundness;

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A failed proof, a soundness violation, or an asserted consequence that does not hold.
    Failure,
    /// Bad usage, unreadable input or a parse error.
    Usage,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failure => 1,
            Status::Usage => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub status: Status,
    pub text: String,
    pub json: Value,
}

impl Report {
    pub fn usage(message: impl Into<String>) -> Self {
        let message = message.into();
        Report {
            status: Status::Usage,
            json: serde_json::json!({ "ok": false, "error": message }),
            text: format!("error: {message}\n"),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.json).expect("json value")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}
