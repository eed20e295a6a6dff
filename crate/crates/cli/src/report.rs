//! Report assembly and serialisation.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hudsal::{IttiParams, Region};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: [&str; 5] = ["id", "p", "m", "region", "content_group"];

/// File names of the dumped intermediate maps.
pub const MAP_FILES: [&str; 5] = [
    "m_s.png",
    "m_s_hud.png",
    "h_s.png",
    "e_plus.png",
    "e_minus.png",
];

/// Hex SHA-256 of the canonical JSON form of `params`.
pub fn fingerprint(params: &IttiParams) -> String {
    let json = serde_json::to_vec(params).expect("parameters serialise");
    hex::encode(Sha256::digest(json))
}

pub fn display3(v: f64) -> String {
    format!("{v:.3}")
}

/// Paths of dumped maps, relative to the report's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapPaths {
    pub m_s: String,
    pub m_s_hud: String,
    pub h_s: String,
    pub e_plus: String,
    pub e_minus: String,
}

impl MapPaths {
    /// Paths for maps stored under `dir` (relative, `/`-separated).
    pub fn under(dir: &str) -> Self {
        let join = |f: &str| {
            if dir.is_empty() {
                f.to_string()
            } else {
                format!("{dir}/{f}")
            }
        };
        let [a, b, c, d, e] = MAP_FILES.map(join);
        Self {
            m_s: a,
            m_s_hud: b,
            h_s: c,
            e_plus: d,
            e_minus: e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub p: f64,
    pub m: f64,
    pub p_display: String,
    pub m_display: String,
    pub region: Region,
    pub content_group: String,
    pub params_fingerprint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maps: Option<MapPaths>,
}

impl CaseReport {
    pub fn new(
        id: &str,
        p: f64,
        m: f64,
        region: Region,
        content_group: &str,
        fingerprint: &str,
    ) -> Self {
        Self {
            id: id.to_string(),
            p,
            m,
            p_display: display3(p),
            m_display: display3(m),
            region,
            content_group: content_group.to_string(),
            params_fingerprint: fingerprint.to_string(),
            maps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub rank: usize,
    pub id: String,
    pub m: f64,
    pub m_display: String,
}

/// Cases of one content group ordered by `m`, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRanking {
    pub content_group: String,
    pub entries: Vec<RankEntry>,
}

/// Ranks cases by `m` within each content group. Cases of different groups
/// are never compared. Groups are listed alphabetically; ties keep input
/// order.
pub fn rank_by_group(cases: &[CaseReport]) -> Vec<GroupRanking> {
    let mut groups: BTreeMap<&str, Vec<&CaseReport>> = BTreeMap::new();
    for c in cases {
        groups.entry(&c.content_group).or_default().push(c);
    }
    groups
        .into_iter()
        .map(|(group, mut members)| {
            members.sort_by(|a, b| b.m.total_cmp(&a.m));
            GroupRanking {
                content_group: group.to_string(),
                entries: members
                    .iter()
                    .enumerate()
                    .map(|(i, c)| RankEntry {
                        rank: i + 1,
                        id: c.id.clone(),
                        m: c.m,
                        m_display: display3(c.m),
                    })
                    .collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub backend: String,
    pub params: IttiParams,
    pub params_fingerprint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
    pub cases: Vec<CaseReport>,
    pub rankings: Vec<GroupRanking>,
}

impl Report {
    pub fn new(backend: &str, params: &IttiParams, cases: Vec<CaseReport>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            backend: backend.to_string(),
            params: params.clone(),
            params_fingerprint: fingerprint(params),
            gain: None,
            rankings: rank_by_group(&cases),
            cases,
        }
    }

    pub fn write_json(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(CSV_HEADER)?;
        for c in &self.cases {
            w.write_record([
                &c.id,
                &c.p.to_string(),
                &c.m.to_string(),
                &c.region.to_string(),
                &c.content_group,
            ])?;
        }
        w.flush()
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_rankings_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["content_group", "rank", "id", "m"])?;
        for g in &self.rankings {
            for e in &g.entries {
                w.write_record([
                    &g.content_group,
                    &e.rank.to_string(),
                    &e.id,
                    &e.m.to_string(),
                ])?;
            }
        }
        w.flush()
            .with_context(|| format!("writing {}", path.display()))
    }

    /// Human-readable ranking tables, one per content group.
    pub fn ranking_table(&self) -> String {
        let mut out = String::new();
        for g in &self.rankings {
            out.push_str(&format!("content_group {}\n", g.content_group));
            out.push_str("  rank  id                    m\n");
            for e in &g.entries {
                out.push_str(&format!("  {:>4}  {:<20}  {}\n", e.rank, e.id, e.m_display));
            }
        }
        out
    }
}

pub fn print_table(report: &Report) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(report.ranking_table().as_bytes());
}

/// `path` relative to `base` with `/` separators, or the path itself when it
/// is not below `base`.
pub fn relative_to(path: &Path, base: &Path) -> String {
    let rel: PathBuf = path
        .strip_prefix(base)
        .map(Path::to_path_buf)
        .unwrap_or_else(|_| path.to_path_buf());
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}
