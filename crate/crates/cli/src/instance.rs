//! Instance files: `{"rank": [...], "n": 2, "building_set": [...], "c": [...], "seed": 7}`.
//! Only `rank` is required.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use polychow::building::BuildingSet;
use polychow::Polymatroid;
use serde_json::Value;

#[derive(Debug, Clone)]
pub struct Instance {
    pub polymatroid: Polymatroid,
    pub building_set: Option<Vec<u32>>,
    pub c: Option<Vec<i64>>,
    pub seed: Option<u64>,
}

fn parse_json(text: &str, origin: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| anyhow!("{origin}: malformed JSON at line {}, column {}: {e}", e.line(), e.column()))
}

fn unsigned_list(v: &Value, field: &str) -> Result<Vec<u64>> {
    let items = v.as_array().ok_or_else(|| anyhow!("field `{field}`: expected an array"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_u64().ok_or_else(|| anyhow!("field `{field}`[{i}]: expected a nonnegative integer, found {x}")))
        .collect()
}

fn masks(v: &Value, field: &str) -> Result<Vec<u32>> {
    unsigned_list(v, field)?
        .into_iter()
        .enumerate()
        .map(|(i, x)| u32::try_from(x).map_err(|_| anyhow!("field `{field}`[{i}]: {x} is not a 32-bit mask")))
        .collect()
}

impl Instance {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let value = parse_json(text, origin)?;
        let obj = value.as_object().ok_or_else(|| anyhow!("{origin}: expected a JSON object"))?;
        for key in obj.keys() {
            if !["n", "rank", "building_set", "c", "seed"].contains(&key.as_str()) {
                bail!("{origin}: unknown field `{key}`");
            }
        }
        let rank_value = obj.get("rank").ok_or_else(|| anyhow!("{origin}: missing field `rank`"))?;
        let rank: Vec<u32> = unsigned_list(rank_value, "rank")
            .map_err(|e| anyhow!("{origin}: {e}"))?
            .into_iter()
            .map(|x| u32::try_from(x).map_err(|_| anyhow!("{origin}: rank value {x} is too large")))
            .collect::<Result<_>>()?;
        if let Some(n) = obj.get("n") {
            let n = n.as_u64().ok_or_else(|| anyhow!("{origin}: field `n`: expected a nonnegative integer"))?;
            if n >= 32 || rank.len() as u64 != 1 << n {
                bail!("{origin}: field `n` = {n} does not match a rank table of length {}", rank.len());
            }
        }
        let polymatroid = Polymatroid::new(rank).map_err(|e| anyhow!("{origin}: field `rank`: {e}"))?;
        let building_set = obj.get("building_set").map(|v| masks(v, "building_set")).transpose().map_err(|e| anyhow!("{origin}: {e}"))?;
        let c = obj
            .get("c")
            .map(|v| {
                let items = v.as_array().ok_or_else(|| anyhow!("field `c`: expected an array"))?;
                items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x.as_i64().ok_or_else(|| anyhow!("field `c`[{i}]: expected an integer")))
                    .collect::<Result<Vec<i64>>>()
            })
            .transpose()
            .map_err(|e| anyhow!("{origin}: {e}"))?;
        let seed = obj
            .get("seed")
            .map(|v| v.as_u64().ok_or_else(|| anyhow!("{origin}: field `seed`: expected a nonnegative integer")))
            .transpose()?;
        Ok(Instance { polymatroid, building_set, c, seed })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The building set from `--building-set` (a file holding a list of masks, or
    /// `maximal`), else the instance's own, else the maximal one.
    pub fn building_set(&self, flag: Option<&str>) -> Result<BuildingSet> {
        let members = match flag {
            Some("maximal") => None,
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                let value = parse_json(&text, path)?;
                let list = value.get("building_set").unwrap_or(&value);
                Some(masks(list, "building_set").map_err(|e| anyhow!("{path}: {e}"))?)
            }
            None => self.building_set.clone(),
        };
        match members {
            None => Ok(BuildingSet::maximal(&self.polymatroid)),
            Some(m) => BuildingSet::new(self.polymatroid.clone(), m).map_err(|e| anyhow!("building set: {e}")),
        }
    }
}
