use serde_json::{Map, Value};

use suzuki_core::SuzukiParams;

use crate::{Command, Format};

/// Command output: a JSON object that the pretty and CSV renderers read from.
#[derive(Debug, Clone)]
pub struct Report {
    head: Map<String, Value>,
    payload: Map<String, Value>,
}

impl Report {
    pub fn new(p: &SuzukiParams) -> Self {
        let mut head = Map::new();
        head.insert("m".into(), p.m.into());
        head.insert("q0".into(), p.q0.into());
        head.insert("q".into(), p.q.into());
        head.insert("g".into(), p.g.into());
        Self {
            head,
            payload: Map::new(),
        }
    }

    pub fn put(&mut self, key: &str, v: Value) {
        self.payload.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.payload.get(key).or_else(|| self.head.get(key))
    }

    pub fn verified(&self) -> Option<bool> {
        self.payload.get("verified").and_then(Value::as_bool)
    }

    pub fn to_json(&self) -> Value {
        let mut all = self.head.clone();
        all.extend(self.payload.clone());
        Value::Object(all)
    }

    pub fn render(&self, format: Format, command: Command) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.csv(command),
            Format::Pretty => self.pretty(),
        }
    }

    fn csv(&self, command: Command) -> String {
        let mut out = String::new();
        match command {
            Command::Basis => {
                out.push_str("index,a,b,c,d,pole_order\n");
                for row in self.payload["basis"].as_array().into_iter().flatten() {
                    let f = |k: &str| row[k].to_string();
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        f("index"),
                        f("a"),
                        f("b"),
                        f("c"),
                        f("d"),
                        f("pole_order")
                    ));
                }
            }
            Command::RankProfile => {
                out.push_str("k,rank\n");
                for (k, r) in self.payload["rank_profile"]
                    .as_array()
                    .into_iter()
                    .flatten()
                    .enumerate()
                {
                    out.push_str(&format!("{},{r}\n", k + 1));
                }
            }
            Command::Matrix => {
                out.push_str("column,image_rows\n");
                for (j, col) in self.payload["columns"].as_array().into_iter().flatten().enumerate() {
                    let rows: Vec<String> = col.as_array().into_iter().flatten().map(Value::to_string).collect();
                    out.push_str(&format!("{j},{}\n", rows.join(";")));
                }
            }
            Command::EoConstraints => {
                out.push_str("index,nu\n");
                let mut fixed: Vec<(u64, &Value)> = self.payload["nu_fixed"]
                    .as_object()
                    .into_iter()
                    .flatten()
                    .map(|(k, v)| (k.parse().unwrap_or(0), v))
                    .collect();
                fixed.sort_by_key(|(k, _)| *k);
                for (k, v) in fixed {
                    out.push_str(&format!("{k},{v}\n"));
                }
            }
            Command::EoEnumerate => {
                out.push_str("type,sequence\n");
                for (t, seq) in self.payload["final_types"].as_array().into_iter().flatten().enumerate() {
                    let vals: Vec<String> = seq.as_array().into_iter().flatten().map(Value::to_string).collect();
                    out.push_str(&format!("{t},{}\n", vals.join(";")));
                }
            }
            Command::Points => {
                out.push_str("k,points,points_naive,maximal\n");
                if let Some(points) = self.payload["points"].as_object() {
                    let mut ks: Vec<&String> = points.keys().collect();
                    ks.sort_by_key(|k| k.parse::<u64>().unwrap_or(0));
                    for k in ks {
                        out.push_str(&format!(
                            "{k},{},{},{}\n",
                            points[k], self.payload["points_naive"][k], self.payload["maximal"][k]
                        ));
                    }
                }
            }
            _ => {
                out.push_str("key,value\n");
                for (k, v) in self.head.iter().chain(&self.payload) {
                    let cell = match v {
                        Value::String(s) => s.clone(),
                        Value::Number(_) | Value::Bool(_) | Value::Null => v.to_string(),
                        other => format!("\"{}\"", other.to_string().replace('"', "\"\"")),
                    };
                    out.push_str(&format!("{k},{cell}\n"));
                }
            }
        }
        out
    }

    fn pretty(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "Suzuki curve S_{}: q0 = {}, q = {}, genus g = {}\n",
            self.head["m"], self.head["q0"], self.head["q"], self.head["g"]
        ));
        for (k, v) in &self.payload {
            match (k.as_str(), v) {
                ("basis", Value::Array(rows)) => {
                    out.push_str("basis:\n");
                    for row in rows {
                        out.push_str(&format!(
                            "  {:>6}  pole {:>6}  {}\n",
                            row["index"],
                            row["pole_order"],
                            row["form"].as_str().unwrap_or("")
                        ));
                    }
                }
                ("columns", Value::Array(cols)) => {
                    if cols.len() <= 128 {
                        out.push_str("matrix (row i, column j = coefficient of basis[i] in C(basis[j])):\n");
                        let n = cols.len();
                        let mut grid = vec![vec!['.'; n]; n];
                        for (j, col) in cols.iter().enumerate() {
                            for i in col.as_array().into_iter().flatten().filter_map(Value::as_u64) {
                                grid[i as usize][j] = '1';
                            }
                        }
                        for row in grid {
                            out.push_str("  ");
                            out.extend(row);
                            out.push('\n');
                        }
                    } else {
                        let ones: usize = cols.iter().map(|c| c.as_array().map_or(0, Vec::len)).sum();
                        out.push_str(&format!("matrix: {0}x{0}, {ones} nonzero entries\n", cols.len()));
                    }
                }
                ("checks", Value::Array(checks)) => {
                    out.push_str("checks:\n");
                    for c in checks {
                        let mark = if c["passed"].as_bool() == Some(true) {
                            "PASS"
                        } else {
                            "FAIL"
                        };
                        out.push_str(&format!(
                            "  [{mark}] {:<24} {}\n",
                            c["check"].as_str().unwrap_or(""),
                            c["detail"].as_str().unwrap_or("")
                        ));
                    }
                }
                ("final_types", Value::Array(types)) => {
                    out.push_str(&format!("final_types ({}):\n", types.len()));
                    for t in types {
                        out.push_str(&format!("  {t}\n"));
                    }
                }
                _ => out.push_str(&format!("{k}: {v}\n")),
            }
        }
        out
    }
}
