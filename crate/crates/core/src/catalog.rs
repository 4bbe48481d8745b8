//! Built-in example connections.

use serde::Serialize;

use crate::model::ConnectionSpec;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    #[serde(skip)]
    source: &'static str,
}

impl CatalogEntry {
    /// The entry as a connection spec file.
    pub fn source(&self) -> &'static str {
        self.source
    }

    pub fn spec(&self) -> ConnectionSpec {
        ConnectionSpec::parse(self.source).expect("catalog entries are well formed")
    }
}

const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "kummer-half",
        description: "regular rank-one germ with residue 1/2",
        source: r#"{"form":"elementary","name":"kummer-half","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[]},"regs":[{"alpha":["1/2",0],"partition":[1]}]}]}"#,
    },
    CatalogEntry {
        name: "trivial",
        description: "trivial rank-one connection",
        source: r#"{"form":"elementary","name":"trivial","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[]},"regs":[{"alpha":[0,0],"partition":[1]}]}]}"#,
    },
    CatalogEntry {
        name: "e-inverse-z",
        description: "rank one, exponential factor e^(1/z)",
        source: r#"{"form":"elementary","name":"e-inverse-z","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[[-1,1,1,0,1]]},"regs":[{"alpha":[0,0],"partition":[1]}]}]}"#,
    },
    CatalogEntry {
        name: "jordan2-regular",
        description: "regular rank two, unipotent monodromy with one Jordan block",
        source: r#"{"form":"elementary","name":"jordan2-regular","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[]},"regs":[{"alpha":[0,0],"partition":[2]}]}]}"#,
    },
    CatalogEntry {
        name: "airy",
        description: "Airy-type system [[0,1],[1/z,0]], slope 1/2",
        source: r#"{"form":"matrix","name":"airy","rank":2,"ram":1,"matrix":[
            [{"ram":1,"terms":[]},{"ram":1,"terms":[[0,1,1,0,1]]}],
            [{"ram":1,"terms":[[-1,1,1,0,1]]},{"ram":1,"terms":[]}]]}"#,
    },
    CatalogEntry {
        name: "mixed-reg-irr",
        description: "regular part with residue 1/3 plus an e^(1/z) summand",
        source: r#"{"form":"elementary","name":"mixed-reg-irr","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[]},"regs":[{"alpha":["1/3",0],"partition":[1]}]},
            {"phi":{"ram":1,"terms":[[-1,1,1,0,1]]},"regs":[{"alpha":[0,0],"partition":[1]}]}]}"#,
    },
    CatalogEntry {
        name: "rank2-stokes",
        description: "e^(1/z) and e^(-1/z) glued by one Stokes constant around arg z = pi",
        source: r#"{"form":"elementary","name":"rank2-stokes","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[[-1,1,1,0,1]]},"regs":[{"alpha":[0,0],"partition":[1]}]},
            {"phi":{"ram":1,"terms":[[-1,-1,1,0,1]]},"regs":[{"alpha":[0,0],"partition":[1]}]}],
            "stokes":{"cover":2,"constants":[{"overlap":1,"i":0,"j":1,"value":[1,0]}]}}"#,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn get(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}
