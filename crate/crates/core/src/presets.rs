//! Shipped configurations for the collision scenarios, embedded so the CLI works from any directory.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::parse_config_str;
use crate::types::RunConfig;

macro_rules! presets {
    ($($name:literal),+ $(,)?) => {
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../presets/", $name, ".cfg")))),+
        ];
    };
}

presets!(
    "fig1",
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "fig7",
    "fig8",
    "fig9",
    "fig10",
    "splitstep_s-0.1_v20",
);

pub fn preset_text(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".cfg").unwrap_or(name);
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<RunConfig> {
    let text = preset_text(name)
        .ok_or_else(|| Error::config("preset", format!("no preset named `{name}`")))?;
    parse_config_str(text, Path::new(name))
}
