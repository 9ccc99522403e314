//! Membership reports and their JSON form.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Member
        } else {
            Verdict::NonMember
        }
    }

    /// Process exit code: 0 member, 1 non-member, 3 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Member => 0,
            Verdict::NonMember => 1,
            Verdict::Inconclusive => 3,
        }
    }
}

/// Evidence that a stage failed. Field values are printed in the stage's
/// scalar mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Nonzero 9x9 minor of one of the two 12x9 coefficient matrices.
    Minor {
        matrix: String,
        rows: Vec<usize>,
        cols: Vec<usize>,
        value: String,
    },
    /// Nonzero value of a degree-6 polynomial (1-based index).
    LmValue { index: usize, value: String },
    /// Nonzero entry of `L R^T - t I` or `R^T L - t I`.
    Trace {
        product: String,
        row: usize,
        col: usize,
        value: String,
    },
    /// Nonzero entry of the commutator expression at a coefficient draw.
    Strassen {
        u: Vec<String>,
        row: usize,
        col: usize,
        value: String,
    },
    /// Lifted condition failing at a transformation pair.
    Lift {
        p: Vec<String>,
        q: Vec<String>,
        condition: String,
        value: String,
    },
    /// Floating-point residual compared with its threshold.
    Residual {
        index: usize,
        value: f64,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
}

impl Stage {
    pub fn new(name: impl Into<String>, pass: bool, witness: Option<Witness>) -> Self {
        Stage {
            name: name.into(),
            pass,
            witness,
            note: None,
            l: None,
            family: None,
            trials: None,
            prime: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: Verdict,
    pub route: String,
    pub stages: Vec<Stage>,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl MembershipReport {
    /// Verdict MEMBER iff every stage passed.
    pub fn from_stages(route: &str, mode: String, stages: Vec<Stage>, seed: Option<u64>) -> Self {
        MembershipReport {
            verdict: Verdict::from_pass(stages.iter().all(|s| s.pass)),
            route: route.to_string(),
            stages,
            mode,
            seed,
        }
    }

    pub fn first_failure(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| !s.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let r = MembershipReport::from_stages(
            "A",
            "rational".into(),
            vec![
                Stage::new("sym9", true, None),
                Stage::new(
                    "trace16",
                    false,
                    Some(Witness::Trace {
                        product: "L*R^T".into(),
                        row: 0,
                        col: 1,
                        value: "2".into(),
                    }),
                ),
            ],
            None,
        );
        assert_eq!(r.verdict, Verdict::NonMember);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"], "NON_MEMBER");
        assert_eq!(v["stages"][1]["witness"]["kind"], "trace");
        assert!(v.get("seed").is_none());
        assert!(v["stages"][0].get("witness").is_none());
        let back: MembershipReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
