//! JSON file formats: channel files, experiment files and tomography results.
//!
//! Complex matrices are nested row arrays of `[re, im]` pairs. Floats are
//! written in shortest round-trip form, so parsing a written file gives back
//! the same bits.

use std::path::{Path, PathBuf};

use choiforge::{
    c64, choi_to_kraus, zoo_channel, ChoiMatrix, ComplexMatrix, InputKind, KrausSet, OpaqueChannel,
    SchmidtInput, Shots, StinespringModel, TomographyConfig, TomographyResult,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Kraus,
    Choi,
    Stinespring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub format_version: u32,
    pub dims: [usize; 2],
    pub representation: Representation,
    pub payload: Value,
}

/// A decoded channel in whichever representation the file used.
#[derive(Debug, Clone)]
pub enum Channel {
    Kraus(KrausSet),
    Choi(ChoiMatrix),
    Stinespring(StinespringModel),
}

impl Channel {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Channel::Kraus(k) => (k.input_dim(), k.output_dim()),
            Channel::Choi(j) => (j.input_dim(), j.output_dim()),
            Channel::Stinespring(s) => (s.system_dim(), s.output_dim()),
        }
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        match self {
            Channel::Kraus(k) => k.to_choi(),
            Channel::Choi(j) => j.clone(),
            Channel::Stinespring(s) => s.to_choi(),
        }
    }

    pub fn to_kraus(&self) -> Result<KrausSet, CliError> {
        match self {
            Channel::Kraus(k) => Ok(k.clone()),
            other => choi_to_kraus(&other.to_choi()).map_err(CliError::from),
        }
    }

    pub fn to_opaque(&self) -> OpaqueChannel {
        match self {
            Channel::Kraus(k) => OpaqueChannel::from_kraus(k.clone()),
            Channel::Choi(j) => OpaqueChannel::from_choi(j.clone()),
            Channel::Stinespring(s) => OpaqueChannel::from_stinespring(s.clone()),
        }
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                (0..m.cols())
                    .map(|c| json!([m[(r, c)].re, m[(r, c)].im]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

pub fn matrix_from_json(v: &Value, field: &str) -> Result<ComplexMatrix, CliError> {
    let rows = v
        .as_array()
        .filter(|rows| !rows.is_empty())
        .ok_or_else(|| CliError::field(field, "expected a nonempty array of rows"))?;
    let mut data = Vec::new();
    let mut cols = None;
    for (r, row) in rows.iter().enumerate() {
        let row_field = format!("{field}[{r}]");
        let entries = row
            .as_array()
            .ok_or_else(|| CliError::field(&row_field, "expected an array of [re, im] pairs"))?;
        match cols {
            None if entries.is_empty() => return Err(CliError::field(&row_field, "empty row")),
            None => cols = Some(entries.len()),
            Some(n) if n != entries.len() => {
                return Err(CliError::field(
                    &row_field,
                    format!("row has {} entries, expected {n}", entries.len()),
                ))
            }
            Some(_) => {}
        }
        for (c, z) in entries.iter().enumerate() {
            let pair = z
                .as_array()
                .filter(|p| p.len() == 2)
                .and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)))
                .ok_or_else(|| {
                    CliError::field(
                        format!("{row_field}[{c}]"),
                        "expected a [re, im] pair of numbers",
                    )
                })?;
            data.push(c64(pair.0, pair.1));
        }
    }
    let cols = cols.unwrap_or(0);
    ComplexMatrix::from_vec(rows.len(), cols, data)
        .map_err(|e| CliError::field(field, e.to_string()))
}

fn expect_shape(m: &ComplexMatrix, shape: (usize, usize), field: &str) -> Result<(), CliError> {
    if m.shape() != shape {
        return Err(CliError::field(
            field,
            format!(
                "matrix is {}x{}, dims require {}x{}",
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            ),
        ));
    }
    Ok(())
}

impl ChannelFile {
    pub fn from_kraus(k: &KrausSet) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dims: [k.input_dim(), k.output_dim()],
            representation: Representation::Kraus,
            payload: Value::Array(k.operators().iter().map(matrix_to_json).collect()),
        }
    }

    pub fn from_choi(j: &ChoiMatrix) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dims: [j.input_dim(), j.output_dim()],
            representation: Representation::Choi,
            payload: matrix_to_json(j.matrix()),
        }
    }

    pub fn from_stinespring(s: &StinespringModel) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            dims: [s.system_dim(), s.output_dim()],
            representation: Representation::Stinespring,
            payload: json!({
                "unitary": matrix_to_json(s.unitary()),
                "ancilla_state": matrix_to_json(s.ancilla_state()),
                "projector": matrix_to_json(s.projector()),
            }),
        }
    }

    pub fn from_channel(ch: &Channel) -> Self {
        match ch {
            Channel::Kraus(k) => Self::from_kraus(k),
            Channel::Choi(j) => Self::from_choi(j),
            Channel::Stinespring(s) => Self::from_stinespring(s),
        }
    }

    pub fn decode(&self) -> Result<Channel, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::field(
                "format_version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    self.format_version
                ),
            ));
        }
        let [n1, n2] = self.dims;
        if n1 == 0 || n2 == 0 {
            return Err(CliError::field("dims", "dimensions must be positive"));
        }
        match self.representation {
            Representation::Kraus => {
                let ops = self
                    .payload
                    .as_array()
                    .filter(|ops| !ops.is_empty())
                    .ok_or_else(|| {
                        CliError::field("payload", "expected a nonempty array of Kraus operators")
                    })?;
                let ops = ops
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let field = format!("payload[{k}]");
                        let m = matrix_from_json(v, &field)?;
                        expect_shape(&m, (n2, n1), &field)?;
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let k = KrausSet::new(n1, n2, ops)
                    .map_err(|e| CliError::field("payload", e.to_string()))?;
                Ok(Channel::Kraus(k))
            }
            Representation::Choi => {
                let m = matrix_from_json(&self.payload, "payload")?;
                expect_shape(&m, (n1 * n2, n1 * n2), "payload")?;
                let j = ChoiMatrix::new(n1, n2, m)
                    .map_err(|e| CliError::field("payload", e.to_string()))?;
                Ok(Channel::Choi(j))
            }
            Representation::Stinespring => {
                let obj = self.payload.as_object().ok_or_else(|| {
                    CliError::field(
                        "payload",
                        "expected an object with unitary, ancilla_state, projector",
                    )
                })?;
                let get = |key: &str| {
                    let field = format!("payload.{key}");
                    let v = obj
                        .get(key)
                        .ok_or_else(|| CliError::field(&field, "missing"))?;
                    matrix_from_json(v, &field)
                };
                let model = StinespringModel::new(
                    n1,
                    n2,
                    get("unitary")?,
                    get("ancilla_state")?,
                    get("projector")?,
                )
                .map_err(|e| CliError::field("payload", e.to_string()))?;
                Ok(Channel::Stinespring(model))
            }
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, source: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::json(source, &e))
}

fn decode_value<T: serde::de::DeserializeOwned>(
    v: Value,
    source: &str,
    field: &str,
) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse {
        source_name: source.to_string(),
        field: Some(field.to_string()),
        line: None,
        column: None,
        message: e.to_string(),
    })
}

/// Reads a channel file, or the `kraus` channel of a tomography result.
pub fn load_channel(path: &Path) -> Result<Channel, CliError> {
    let source = path.display().to_string();
    let text = read_text(path)?;
    let value: Value = parse_json(&text, &source)?;
    let file_value = match value.get("kraus") {
        Some(k) if value.get("representation").is_none() => k.clone(),
        _ => value,
    };
    let file: ChannelFile = decode_value(file_value, &source, "channel")?;
    file.decode().map_err(|e| e.in_source(&source))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ZooSpec {
    name: String,
    #[serde(default)]
    params: Vec<f64>,
    dims: [usize; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ShotsJson {
    Count(u64),
    Word(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchmidtJson {
    coefficients: Vec<f64>,
    #[serde(default)]
    u: Option<Value>,
    #[serde(default)]
    v: Option<Value>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigJson {
    #[serde(default)]
    shots: Option<ShotsJson>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    input_kind: Option<Value>,
    #[serde(default)]
    kraus_threshold: Option<f64>,
    #[serde(default)]
    psd_projection: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentJson {
    channel: Value,
    #[serde(default)]
    config: ConfigJson,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub channel: Channel,
    pub config: TomographyConfig,
}

/// Parses an experiment file. A string-valued `channel` is a path relative
/// to the experiment file's directory.
pub fn load_experiment(path: &Path) -> Result<Experiment, CliError> {
    let source = path.display().to_string();
    let text = read_text(path)?;
    let raw: ExperimentJson = parse_json(&text, &source)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let channel = decode_experiment_channel(raw.channel, &base, &source)?;
    let config = decode_config(raw.config, channel.dims().0, &source)?;
    Ok(Experiment { channel, config })
}

fn decode_experiment_channel(v: Value, base: &Path, source: &str) -> Result<Channel, CliError> {
    match &v {
        Value::String(p) => {
            let p = PathBuf::from(p);
            load_channel(&if p.is_absolute() { p } else { base.join(p) })
        }
        Value::Object(obj) if obj.contains_key("representation") => {
            let file: ChannelFile = decode_value(v, source, "channel")?;
            file.decode()
                .map_err(|e| e.prefixed("channel").in_source(source))
        }
        Value::Object(obj) if obj.contains_key("name") => {
            let spec: ZooSpec = decode_value(v, source, "channel")?;
            let k = zoo_channel(&spec.name, &spec.params, spec.dims[0], spec.dims[1])?;
            Ok(Channel::Kraus(k))
        }
        _ => Err(CliError::field(
            "channel",
            "expected a channel file object, a zoo spec {name, params, dims}, or a path",
        )
        .in_source(source)),
    }
}

fn decode_config(c: ConfigJson, n1: usize, source: &str) -> Result<TomographyConfig, CliError> {
    let shots = match c.shots {
        None => Shots::Exact,
        Some(ShotsJson::Word(w)) if w == "exact" => Shots::Exact,
        Some(ShotsJson::Word(w)) => {
            return Err(CliError::field(
                "config.shots",
                format!("expected a count or \"exact\", got {w:?}"),
            )
            .in_source(source))
        }
        Some(ShotsJson::Count(0)) => return Err(CliError::Config("shots must be positive".into())),
        Some(ShotsJson::Count(n)) => Shots::Finite(n),
    };
    let input = match c.input_kind {
        None => InputKind::MaxEntangled,
        Some(Value::String(s)) if s == "max_entangled" => InputKind::MaxEntangled,
        Some(Value::Object(obj)) if obj.len() == 1 && obj.contains_key("schmidt") => {
            let s: SchmidtJson =
                decode_value(obj["schmidt"].clone(), source, "config.input_kind.schmidt")?;
            let n = s.coefficients.len();
            let basis = |v: Option<Value>, key: &str| match v {
                None => Ok(ComplexMatrix::identity(n)),
                Some(v) => matrix_from_json(&v, &format!("config.input_kind.schmidt.{key}"))
                    .map_err(|e| e.in_source(source)),
            };
            let (u, v) = (basis(s.u, "u")?, basis(s.v, "v")?);
            InputKind::Schmidt(SchmidtInput::new(s.coefficients, u, v).map_err(CliError::config)?)
        }
        Some(_) => {
            return Err(CliError::field(
                "config.input_kind",
                "expected \"max_entangled\" or {\"schmidt\": {coefficients, u, v}}",
            )
            .in_source(source))
        }
    };
    let config = TomographyConfig {
        shots,
        seed: c.seed.unwrap_or(0),
        input,
        kraus_threshold: c.kraus_threshold,
        psd_projection: c.psd_projection.unwrap_or(true),
    };
    config.validate(n1).map_err(CliError::config)?;
    Ok(config)
}

#[derive(Debug, Clone, Serialize)]
pub struct TomographyDiagnostics {
    pub choi_eigenvalues: Vec<f64>,
    pub kraus_count: usize,
    pub kraus_threshold: f64,
    pub negativity_removed: f64,
    pub success_trace: f64,
    pub trace_decreasing: bool,
    pub shots: Value,
    pub shots_used: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TomographyReport {
    pub format_version: u32,
    pub dims: [usize; 2],
    pub estimated_choi: ChannelFile,
    pub kraus: ChannelFile,
    pub raw_state_estimate: Value,
    pub diagnostics: TomographyDiagnostics,
}

impl TomographyReport {
    pub fn new(result: &TomographyResult, config: &TomographyConfig) -> Result<Self, CliError> {
        let j = &result.estimated_choi;
        Ok(Self {
            format_version: FORMAT_VERSION,
            dims: [j.input_dim(), j.output_dim()],
            estimated_choi: ChannelFile::from_choi(j),
            kraus: ChannelFile::from_kraus(&result.kraus),
            raw_state_estimate: matrix_to_json(&result.raw_state_estimate),
            diagnostics: TomographyDiagnostics {
                choi_eigenvalues: j.eigen()?.eigenvalues,
                kraus_count: result.kraus.len(),
                kraus_threshold: result.kraus_threshold,
                negativity_removed: result.negativity_removed,
                success_trace: result.success_trace,
                trace_decreasing: result.trace_decreasing,
                shots: match config.shots {
                    Shots::Exact => json!("exact"),
                    Shots::Finite(n) => json!(n),
                },
                shots_used: result.shots_used,
                seed: config.seed,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use choiforge::random::gaussian_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matrices_round_trip_bit_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut m = gaussian_matrix(3, 5, &mut rng);
        m[(0, 0)] = c64(-0.0, f64::MIN_POSITIVE);
        m[(1, 1)] = c64(f64::MAX, 1e-310);
        m[(2, 2)] = c64(0.1 + 0.2, 1.0 / 3.0);
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        let back = matrix_from_json(&serde_json::from_str(&text).unwrap(), "m").unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn ragged_rows_are_reported_with_their_field() {
        let v = json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0]]]);
        let err = matrix_from_json(&v, "payload[0]").unwrap_err();
        assert!(err.to_string().contains("payload[0][1]"), "{err}");
        let v = json!([[[1.0, 0.0, 3.0]]]);
        assert!(matrix_from_json(&v, "p")
            .unwrap_err()
            .to_string()
            .contains("p[0][0]"));
    }

    #[test]
    fn channel_files_round_trip() {
        let k = zoo_channel("amplitude_damping", &[0.3], 2, 2).unwrap();
        for file in [
            ChannelFile::from_kraus(&k),
            ChannelFile::from_choi(&k.to_choi()),
        ] {
            let text = serde_json::to_string_pretty(&file).unwrap();
            let parsed: ChannelFile = serde_json::from_str(&text).unwrap();
            assert_eq!(parsed, file);
            let again = ChannelFile::from_channel(&parsed.decode().unwrap());
            assert_eq!(again, file);
        }
    }

    #[test]
    fn shape_mismatch_names_the_operator() {
        let mut file = ChannelFile::from_kraus(&zoo_channel("identity", &[], 2, 2).unwrap());
        file.dims = [3, 3];
        let err = file.decode().unwrap_err();
        assert!(err.to_string().contains("payload[0]"), "{err}");
    }
}
