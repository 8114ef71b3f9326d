//! Registry of the rules the oracle and the decider can fire.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    R0,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    D0,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    T1,
    T2,
    T3,
    T4,
}

/// One registry entry: a stable anchor plus a plain statement of the rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub rule: RuleId,
    pub anchor: String,
    pub statement: String,
}

impl RuleId {
    pub const ALL: [RuleId; 24] = [
        RuleId::R0,
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::R10,
        RuleId::R11,
        RuleId::R12,
        RuleId::D0,
        RuleId::D1,
        RuleId::D2,
        RuleId::D3,
        RuleId::D4,
        RuleId::D5,
        RuleId::D6,
        RuleId::T1,
        RuleId::T2,
        RuleId::T3,
        RuleId::T4,
    ];

    pub fn anchor(self) -> &'static str {
        match self {
            RuleId::R0 => "embed/identity",
            RuleId::R1 => "embed/tl-smoothness-for-integrability",
            RuleId::R2 => "embed/besov-smoothness-for-integrability",
            RuleId::R3 => "embed/lower-integrability",
            RuleId::R4 => "embed/fine-index",
            RuleId::R5 => "embed/besov-tl-crossing",
            RuleId::R6 => "embed/classical-sobolev-iff",
            RuleId::R7 => "embed/holder-inclusion",
            RuleId::R8 => "embed/sequence-lp",
            RuleId::R9 => "embed/lebesgue-bounded",
            RuleId::R10 => "embed/into-sup",
            RuleId::R11 => "embed/identifications",
            RuleId::R12 => "embed/mixed-set-inclusion",
            RuleId::D0 => "sandwich/hilbert-identity",
            RuleId::D1 => "sandwich/sequence-lp",
            RuleId::D2 => "sandwich/lebesgue-lp",
            RuleId::D3 => "sandwich/holder-packing",
            RuleId::D4 => "sandwich/slobodeckij",
            RuleId::D5 => "sandwich/besov-tl",
            RuleId::D6 => "sandwich/mixed-necessity",
            RuleId::T1 => "bounded/unbounded-domain",
            RuleId::T2 => "bounded/besov-tl-into-c0",
            RuleId::T3 => "bounded/holder-packing",
            RuleId::T4 => "bounded/mixed-necessity",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            RuleId::R0 => "Every space embeds into itself.",
            RuleId::R1 => "On a bounded smooth domain F(s,p1,q1) embeds into F(t,p2,q2) when s > t and s - t >= d/p1 - d/p2.",
            RuleId::R2 => "On a bounded smooth domain B(s,p1,q1) embeds into B(t,p2,q2) when s > t and s - t > d/p1 - d/p2.",
            RuleId::R3 => "At equal smoothness on a bounded domain the integrability index may drop (p1 >= p2) with the fine index kept.",
            RuleId::R4 => "At equal smoothness and integrability the fine index may grow (q1 <= q2).",
            RuleId::R5 => "Besov and Triebel-Lizorkin spaces embed into each other when s > t and s - t > d(1/p1 - 1/p2).",
            RuleId::R6 => "Integer-order Sobolev spaces with s >= t embed on a bounded smooth domain exactly when s - t >= d/p1 - d/p2.",
            RuleId::R7 => "On a bounded metric space C^a embeds into C^b for b <= a, and every Hölder space embeds into the sup-normed space.",
            RuleId::R8 => "l_p embeds into l_q whenever p <= q.",
            RuleId::R9 => "On a bounded domain of finite measure L_p embeds into L_q whenever q <= p.",
            RuleId::R10 => "Besov and Triebel-Lizorkin spaces with s > d/p embed into the bounded continuous functions.",
            RuleId::R11 => "Sobolev, Slobodeckij, Hölder and diagonal Besov spaces are rewritten to their Triebel-Lizorkin or Besov form before matching.",
            RuleId::R12 => "A mixed Sobolev space over A embeds into the one over B when A contains B and p1 >= p2 on a bounded domain.",
            RuleId::D0 => "The identity of a Hilbert space factors through that Hilbert space.",
            RuleId::D1 => "The inclusion l_p into l_q factors through a Hilbert space exactly when p <= 2 <= q.",
            RuleId::D2 => "On a bounded domain the inclusion L_p into L_q factors through a Hilbert space exactly when q <= 2 <= p.",
            RuleId::D3 => "A Hilbert space between C^a and C^b forces the packing numbers to grow at most like delta^(-2(a-b)); on a cube a - b > d/2 suffices.",
            RuleId::D4 => "Slobodeckij embeddings factor through W^u_2 when s - t exceeds the deficiency and cannot when s - t is below it.",
            RuleId::D5 => "Besov and Triebel-Lizorkin embeddings follow the Slobodeckij thresholds; the necessary side needs t > 0.",
            RuleId::D6 => "For mixed Sobolev spaces a factorization needs |A|_1 - |B|_1 >= deficiency; nothing is claimed beyond that.",
            RuleId::T1 => "On an unbounded open domain no RKHS with bounded kernel contains all smooth functions.",
            RuleId::T2 => "Besov and Triebel-Lizorkin spaces with s > d/p reach C^0 through W^u_2 when s > (d/p - d/2)_+ + d/2 and cannot when s is below it.",
            RuleId::T3 => "A Hilbert space between C^a and the sup-normed space forces packing growth at most delta^(-2a); on a cube a > d/2 suffices.",
            RuleId::T4 => "For a mixed Sobolev space with |A|_1 >= d/p a bounded-kernel RKHS above it needs |A|_1 >= (d/p - d/2)_+ + d/2.",
        }
    }

    pub fn citation(self) -> Citation {
        Citation {
            rule: self,
            anchor: self.anchor().to_string(),
            statement: self.statement().to_string(),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}
