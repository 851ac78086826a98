use passelect::emulator::EmulatorError;
use passelect::passes::PassError;
use passelect::selector::SelectorError;
use passelect::Error;

pub const USAGE: u8 = 1;
pub const INPUT: u8 = 2;
pub const INTERNAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: INPUT,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: INTERNAL,
            message: message.into(),
        }
    }
}

fn pass_code(e: &PassError) -> u8 {
    match e {
        PassError::Ir(_)
        | PassError::CircuitTooLarge { .. }
        | PassError::InvalidLayout(_)
        | PassError::UnknownOption { .. }
        | PassError::Config(_) => INPUT,
        _ => INTERNAL,
    }
}

fn emulator_code(e: &EmulatorError) -> u8 {
    match e {
        EmulatorError::Ir(_) | EmulatorError::Epoch { .. } | EmulatorError::Params(_) => INPUT,
        _ => INTERNAL,
    }
}

fn selector_code(e: &SelectorError) -> u8 {
    match e {
        SelectorError::Pass(p) => pass_code(p),
        SelectorError::Emulator(p) => emulator_code(p),
        SelectorError::Space(_) | SelectorError::TargetPeaksUnknown | SelectorError::OracleUnavailable(_) => INPUT,
        _ => INTERNAL,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Ir(_) | Error::Qasm(_) | Error::Benchmark(_) => INPUT,
            Error::Pass(p) => pass_code(p),
            Error::Emulator(p) => emulator_code(p),
            Error::Selector(p) => selector_code(p),
            Error::Sim(_) => INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

macro_rules! via_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        })*
    };
}

via_error!(
    passelect::IrError,
    passelect::ir::QasmError,
    passelect::BenchmarkError,
    PassError,
    EmulatorError,
    SelectorError
);
