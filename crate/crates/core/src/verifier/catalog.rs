//! Identifiers of the checked inequalities and rate claims.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::report::ReportKind;

/// One entry of the bound catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    Thm11Rate,
    Eq14Sandwich,
    Thm12Tail,
    Thm12Mean,
    Prop21,
    Prop23Moment,
    Prop23Tail,
    Cor24,
    Cor32,
    Prop42,
    Prop52Moment,
    Prop52Tail,
    Prop54Mgf,
    Prop51Ent,
    Prop61Mgf,
    Cor62,
    Prop63Tail,
    Prop63Mean,
    Prop64,
    Cor65Count,
    Thm71,
    Hensley,
    Thm13W1,
    Thm13Kolm,
    Thm82Point,
    Ex1,
    Ex2,
    OpenSqrtN,
}

/// Which functional inequality an entry relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    None,
    Poincare,
    LogSobolev,
}

impl BoundId {
    pub const ALL: [BoundId; 28] = [
        BoundId::Thm11Rate,
        BoundId::Eq14Sandwich,
        BoundId::Thm12Tail,
        BoundId::Thm12Mean,
        BoundId::Prop21,
        BoundId::Prop23Moment,
        BoundId::Prop23Tail,
        BoundId::Cor24,
        BoundId::Cor32,
        BoundId::Prop42,
        BoundId::Prop52Moment,
        BoundId::Prop52Tail,
        BoundId::Prop54Mgf,
        BoundId::Prop51Ent,
        BoundId::Prop61Mgf,
        BoundId::Cor62,
        BoundId::Prop63Tail,
        BoundId::Prop63Mean,
        BoundId::Prop64,
        BoundId::Cor65Count,
        BoundId::Thm71,
        BoundId::Hensley,
        BoundId::Thm13W1,
        BoundId::Thm13Kolm,
        BoundId::Thm82Point,
        BoundId::Ex1,
        BoundId::Ex2,
        BoundId::OpenSqrtN,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Thm11Rate => "THM_1_1_RATE",
            BoundId::Eq14Sandwich => "EQ_1_4_SANDWICH",
            BoundId::Thm12Tail => "THM_1_2_TAIL",
            BoundId::Thm12Mean => "THM_1_2_MEAN",
            BoundId::Prop21 => "PROP_2_1",
            BoundId::Prop23Moment => "PROP_2_3_MOMENT",
            BoundId::Prop23Tail => "PROP_2_3_TAIL",
            BoundId::Cor24 => "COR_2_4",
            BoundId::Cor32 => "COR_3_2",
            BoundId::Prop42 => "PROP_4_2",
            BoundId::Prop52Moment => "PROP_5_2_MOMENT",
            BoundId::Prop52Tail => "PROP_5_2_TAIL",
            BoundId::Prop54Mgf => "PROP_5_4_MGF",
            BoundId::Prop51Ent => "PROP_5_1_ENT",
            BoundId::Prop61Mgf => "PROP_6_1_MGF",
            BoundId::Cor62 => "COR_6_2",
            BoundId::Prop63Tail => "PROP_6_3_TAIL",
            BoundId::Prop63Mean => "PROP_6_3_MEAN",
            BoundId::Prop64 => "PROP_6_4",
            BoundId::Cor65Count => "COR_6_5_COUNT",
            BoundId::Thm71 => "THM_7_1",
            BoundId::Hensley => "HENSLEY",
            BoundId::Thm13W1 => "THM_1_3_W1",
            BoundId::Thm13Kolm => "THM_1_3_KOLM",
            BoundId::Thm82Point => "THM_8_2_POINT",
            BoundId::Ex1 => "EX_1",
            BoundId::Ex2 => "EX_2",
            BoundId::OpenSqrtN => "OPEN_SQRT_N",
        }
    }

    /// Kind of the summary report(s) the entry produces.
    pub fn kind(self) -> ReportKind {
        match self {
            BoundId::Thm11Rate
            | BoundId::Prop63Mean
            | BoundId::Thm13W1
            | BoundId::Thm13Kolm
            | BoundId::Thm82Point
            | BoundId::Ex1
            | BoundId::Ex2 => ReportKind::Rate,
            BoundId::Prop42 | BoundId::OpenSqrtN => ReportKind::Exploratory,
            _ => ReportKind::Inequality,
        }
    }

    /// Rate entries run over the scenario's n sweep instead of the plan's n.
    pub fn uses_sweep(self) -> bool {
        self.kind() == ReportKind::Rate || self == BoundId::OpenSqrtN
    }

    pub fn requirement(self) -> Requirement {
        match self {
            BoundId::Thm11Rate
            | BoundId::Prop21
            | BoundId::Prop23Moment
            | BoundId::Prop23Tail
            | BoundId::Cor24
            | BoundId::Cor32
            | BoundId::Prop42
            | BoundId::Hensley => Requirement::Poincare,
            BoundId::Eq14Sandwich | BoundId::Ex1 | BoundId::Ex2 | BoundId::Thm13W1 => Requirement::None,
            _ => Requirement::LogSobolev,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            BoundId::Thm11Rate => "E W1(F_n,F) decays like sigma((A + log n)/n)^(1/3)",
            BoundId::Eq14Sandwich => "(1/2n) sum E|X_i* - E X_i*| <= E W1(F_n,F) <= (2/n) sum E|X_i* - E X_i*|",
            BoundId::Thm12Tail => "P{||F_n-F|| >= r} <= (4/r) exp(-(2/27)(r/beta)^3)",
            BoundId::Thm12Mean => "E||F_n-F|| <= 5 beta log^(1/3)(1 + 1/beta)",
            BoundId::Prop21 => "E|int f dF_n - int f dF|^2 <= (sigma^2/n) int f'^2 dF",
            BoundId::Prop23Moment => "E|int f dF_n - int f dF|^p <= (sigma p)^p n^(-p/2) int |f'|^p dF",
            BoundId::Prop23Tail => "P{|int f dF_n - int f dF| >= h} <= 6 exp(-n h/sigma) for 1-Lipschitz f",
            BoundId::Cor24 => "E|int_a^b (F_n-F)| <= (sigma/sqrt n) sqrt(F(b)-F(a))",
            BoundId::Cor32 => "E int_a^b |F_n-F| <= (sigma/sqrt n)[1 + 3((b-a)/(sigma/sqrt n))^(1/3)]",
            BoundId::Prop42 => "P{W1 >= C sigma((A+log n)/n)^(1/3) + h} <= C exp(-h sqrt(n)/sigma), C calibrated",
            BoundId::Prop52Moment => "E|int f dF_n - int f dF|^p <= (sigma sqrt p)^p n^(-p/2) int |f'|^p dF",
            BoundId::Prop52Tail => "P{|int f dF_n - int f dF| >= h} <= 2 exp(-n h^2/(2 sigma^2)) for 1-Lipschitz f",
            BoundId::Prop54Mgf => "log E exp(t(int f dF_n - int f dF)) <= t int [P_(t sigma^2/n) f - f] dF",
            BoundId::Prop51Ent => "Ent[(int f dF_n)^2] <= (2 sigma^2/n) int f'^2 dF",
            BoundId::Prop61Mgf => "log E exp(t(F_n(x)-F(x))) <= t(F(x+h)-F(x)), h = sqrt(2 sigma^2 t/n)",
            BoundId::Cor62 => "E int_a^b |F_n-F| <= 4(sigma^2 (b-a)/n)^(1/3)",
            BoundId::Prop63Tail => "P{|F_n(x)-F(x)| >= beta r} <= 2 exp(-2 r^3/27)",
            BoundId::Prop63Mean => "E|F_n(x)-F(x)| decays like beta",
            BoundId::Prop64 => "P{|F_n(x)-G(x)| >= beta r + ||F-G||} <= 2 exp(-2 r^3/27)",
            BoundId::Cor65Count => "P{|N_I - n int_I g| >= n delta |I|} <= 4 exp(-c(delta |I|/beta)^3), c = 1/112",
            BoundId::Thm71 => "E||F_n-G|| <= 5 beta log^(1/3)(1 + 1/beta) + ||F-G||",
            BoundId::Hensley => "M sigma >= 1/sqrt(12) for centered coordinates",
            BoundId::Thm13W1 => "matrix E W1(F_n,F) decays like sigma/n^(2/3)",
            BoundId::Thm13Kolm => "matrix E||F_n-G|| decays like (sigma/n)^(2/3) log^(1/3) n + ||F-G||",
            BoundId::Thm82Point => "matrix E|F_n(x)-G(x)| decays like ||F-G|| + (sigma/n)^(6/7) + g(x)^(2/3)(sigma/n)^(2/3)",
            BoundId::Ex1 => "independent uniforms on (i-1,i): E||F_n-F|| = Theta(1/n), E W1 = Theta(1)",
            BoundId::Ex2 => "all X_i equal to one uniform: E||F_n-F|| = Theta(1)",
            BoundId::OpenSqrtN => "observed decay exponent of E||F_n-F|| against 1/sqrt(n)",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let key = s.trim();
        BoundId::ALL
            .iter()
            .copied()
            .find(|b| b.as_str().eq_ignore_ascii_case(key))
            .ok_or_else(|| Error::UnknownBound(key.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in BoundId::ALL {
            assert_eq!(b.as_str().parse::<BoundId>().unwrap(), b);
        }
        assert!(matches!("NOPE".parse::<BoundId>(), Err(Error::UnknownBound(_))));
        assert_eq!("cor_6_2".parse::<BoundId>().unwrap(), BoundId::Cor62);
    }
}
