//! Opaque string identifiers for actors, generators and situations.
//!
//! All three share the same lexical rules: a nonempty UTF-8 token with no
//! comma, carriage return or newline. Ordering is byte-lexicographic, which is
//! the iteration order used everywhere in the crate.

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn validate(token: &str) -> Result<()> {
    let reason = if token.is_empty() {
        "token is empty"
    } else if token.contains(',') {
        "token contains a comma"
    } else if token.contains(['\n', '\r']) {
        "token contains a line break"
    } else {
        return Ok(());
    };
    Err(Error::InvalidToken {
        token: token.to_owned(),
        reason,
    })
}

macro_rules! token_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(token: impl Into<String>) -> Result<Self> {
                let token = token.into();
                validate(&token)?;
                Ok(Self(token))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;

            fn try_from(token: String) -> Result<Self> {
                Self::new(token)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = Error;

            fn try_from(token: &str) -> Result<Self> {
                Self::new(token)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

token_type!(
    /// An actor `a ∈ A`.
    ActorId
);
token_type!(
    /// A generator: one atomic trigger of thinking an actor may hold.
    GeneratorId
);
token_type!(
    /// A situation of a finite [`SituationUniverse`](crate::SituationUniverse).
    SituationId
);
