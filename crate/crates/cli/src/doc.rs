//! Versioned JSON wrapper around a certificate.

use cpdcert::certify::Certificate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = "cpdcert/1";

/// Field order is fixed by the struct; serde_json keeps it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub version: String,
    /// sha256 over the input files in argument order.
    pub inputs_digest: String,
    pub certificate: Certificate,
    pub summary: String,
}

pub fn digest(texts: &[String]) -> String {
    let mut h = Sha256::new();
    for t in texts {
        h.update((t.len() as u64).to_le_bytes());
        h.update(t.as_bytes());
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

fn list(v: &[usize; 3]) -> String {
    format!("A {}, B {}, C {}", v[0], v[1], v[2])
}

pub fn summarize(c: &Certificate) -> String {
    let [i, j, k] = c.inputs.dims;
    let mut s = format!("tensor {i} x {j} x {k}, R = {}, {} arithmetic", c.inputs.r, c.inputs.mode);
    if c.inputs.symmetric {
        s.push_str(", symmetric slices (A = B)");
    }
    s.push('\n');
    s.push_str(&format!("ranks    {}\n", list(&c.computed.ranks)));
    s.push_str(&format!("k-ranks  {}\n", list(&c.computed.kranks)));
    s.push_str(&format!("m        {}\n", list(&c.computed.m)));
    if c.fired.is_empty() {
        s.push_str("fired    none\n");
    }
    for f in &c.fired {
        let roles: Vec<String> = f.roles.iter().map(|r| r.to_string()).collect();
        s.push_str(&format!("fired    {:?} ({}) -> {}\n", f.rule, roles.join(","), f.conclusion));
    }
    for n in &c.notes {
        s.push_str(&format!("note     {n}\n"));
    }
    s.push_str(&format!("result   {}\n", c.conclusion));
    s
}

impl CertificateDocument {
    pub fn new(inputs_digest: String, certificate: Certificate) -> Self {
        let summary = summarize(&certificate);
        CertificateDocument { version: VERSION.to_string(), inputs_digest, certificate, summary }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}
