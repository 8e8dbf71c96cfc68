//! RTL generators for the five architectures.
//!
//! Every generator returns a [`Design`]: the top module plus each distinct
//! module it instantiates, directly or indirectly.

mod builder;
mod digit_serial;
mod karatsuba;
mod sbm;
mod toom;

use thiserror::Error;

use crate::arch::{ArchKind, Method};
use crate::num::ArithMode;
use crate::rtl::flatten::{flatten_hierarchy, FlattenError};
use crate::rtl::ir::RtlModule;

pub use digit_serial::gen_digit_serial;
pub use karatsuba::gen_karatsuba2;
pub use sbm::{gen_sbm, gen_sbm_rect};
pub use toom::{gen_toom3, gen_toom4};

/// Version string embedded in emitted artifacts.
pub const GENERATOR_VERSION: &str = concat!("polymul ", env!("CARGO_PKG_VERSION"));

pub const MIN_WIDTH: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("digit size {n} is not in 1..={m}")]
    BadDigit { n: u32, m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenParams {
    pub kind: ArchKind,
    pub m: u32,
    pub mode: ArithMode,
}

impl GenParams {
    pub fn new(kind: ArchKind, m: u32, mode: ArithMode) -> Self {
        GenParams { kind, m, mode }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        match self.kind {
            ArchKind::Plain(method) => validate_method(method, self.m, self.mode),
            ArchKind::DigitSerial { digit, inner } => {
                validate_method(inner, self.m, self.mode)?;
                if digit == 0 || digit > u64::from(self.m) {
                    return Err(GenError::BadDigit { n: digit.min(u64::from(u32::MAX)) as u32, m: self.m });
                }
                Ok(())
            }
        }
    }
}

fn validate_method(method: Method, m: u32, mode: ArithMode) -> Result<(), GenError> {
    let min = match method {
        Method::Toom3 => 6,
        Method::Toom4 => 8,
        _ => MIN_WIDTH,
    };
    if m < min {
        return Err(GenError::BadParams(format!("{method} needs m >= {min}, got {m}")));
    }
    if !method.supports(mode) {
        return Err(GenError::BadParams(format!("{method} supports integer mode only")));
    }
    Ok(())
}

/// A generated hierarchy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    pub top: RtlModule,
    /// Distinct descendant modules of `top`.
    pub library: Vec<RtlModule>,
}

impl Design {
    pub(crate) fn leaf(top: RtlModule) -> Self {
        Design { top, library: Vec::new() }
    }

    pub(crate) fn adopt(&mut self, child: Design) {
        for module in child.library.into_iter().chain(std::iter::once(child.top)) {
            if !self.library.iter().any(|m| m.name == module.name) {
                self.library.push(module);
            }
        }
        self.library.sort_by(|x, y| x.name.cmp(&y.name));
    }

    /// All modules, children before parents.
    pub fn modules(&self) -> Result<Vec<RtlModule>, FlattenError> {
        flatten_hierarchy(&self.top, &self.library)
    }
}

pub fn generate(params: &GenParams) -> Result<Design, GenError> {
    params.validate()?;
    let (m, mode) = (params.m, params.mode);
    match params.kind {
        ArchKind::Plain(Method::Sbm) => gen_sbm(m, mode),
        ArchKind::Plain(Method::Karatsuba2) => gen_karatsuba2(m, mode),
        ArchKind::Plain(Method::Toom3) => gen_toom3(m),
        ArchKind::Plain(Method::Toom4) => gen_toom4(m),
        ArchKind::DigitSerial { digit, inner } => gen_digit_serial(m, digit as u32, inner, mode),
    }
}

pub(crate) fn mode_suffix(mode: ArithMode) -> &'static str {
    match mode {
        ArithMode::Integer => "",
        ArithMode::CarryLess => "_gf2",
    }
}
