use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;

/// Periodic half-strip `[0, L) × [0, Y]` with `nx` columns and `ny` interior
/// rows between the trace row `y = 0` and the cap row `y = Y`.
///
/// Rows are graded toward the bottom: `y_j = Y (j/(ny+1))^q`, `j = 0..=ny+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfStrip {
    period: f64,
    height: f64,
    nx: usize,
    ny: usize,
    a: f64,
    grading: f64,
    y: Vec<f64>,
}

/// Default grading exponent `max(1, 2/(1+a))`.
pub fn default_grading(a: f64) -> f64 {
    (2.0 / (1.0 + a)).max(1.0)
}

impl HalfStrip {
    pub fn new(period: f64, height: f64, nx: usize, ny: usize, a: f64) -> Result<Self> {
        Self::with_grading(period, height, nx, ny, a, default_grading(a))
    }

    /// Strip with weight exponent `a = 1 − 2γ` taken from `params`.
    pub fn for_params(params: &FracParams, period: f64, height: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(period, height, nx, ny, params.a())
    }

    pub fn with_grading(period: f64, height: f64, nx: usize, ny: usize, a: f64, grading: f64) -> Result<Self> {
        if nx < 4 || ny < 4 {
            return Err(Error::Parameter(format!("need nx, ny >= 4, got {nx} x {ny}")));
        }
        if !(period > 0.0 && period.is_finite() && height > 0.0 && height.is_finite()) {
            return Err(Error::Parameter(format!(
                "period and height must be positive and finite, got L={period}, Y={height}"
            )));
        }
        if !(a > -1.0 && a < 1.0) {
            return Err(Error::Parameter(format!("weight exponent a must lie in (-1, 1), got {a}")));
        }
        if !(grading >= 1.0 && grading.is_finite()) {
            return Err(Error::Parameter(format!("grading exponent must be >= 1, got {grading}")));
        }
        let m = (ny + 1) as f64;
        let y: Vec<f64> = (0..=ny + 1)
            .map(|j| height * (j as f64 / m).powf(grading))
            .collect();
        if y.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("y-nodes are not strictly increasing".into()));
        }
        Ok(Self {
            period,
            height,
            nx,
            ny,
            a,
            grading,
            y,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Number of interior rows.
    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn hx(&self) -> f64 {
        self.period / self.nx as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }

    /// All `ny + 2` row heights, trace and cap included.
    pub fn y_nodes(&self) -> &[f64] {
        &self.y
    }

    /// Total number of rows, `ny + 2`.
    pub fn rows(&self) -> usize {
        self.ny + 2
    }
}

/// Values on every node of a [`HalfStrip`], row-major with `y` outer:
/// `values[j * nx + i] = U(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    strip: HalfStrip,
    values: Vec<f64>,
}

const MAGIC: &[u8; 8] = b"FYGRID01";

impl GridField {
    pub fn new(strip: HalfStrip, values: Vec<f64>) -> Result<Self> {
        let want = strip.nx * strip.rows();
        if values.len() != want {
            return Err(Error::Dimension(format!("{} values for a {}-node grid", values.len(), want)));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite grid value at index {k}")));
        }
        Ok(Self { strip, values })
    }

    pub fn zeros(strip: HalfStrip) -> Self {
        let values = vec![0.0; strip.nx * strip.rows()];
        Self { strip, values }
    }

    /// `U(x_i, y_j) = f(x_i, y_j)`.
    pub fn from_fn(strip: HalfStrip, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(strip.nx * strip.rows());
        for &y in &strip.y {
            for i in 0..strip.nx {
                values.push(f(strip.x(i), y));
            }
        }
        Self::new(strip, values)
    }

    pub fn strip(&self) -> &HalfStrip {
        &self.strip
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.strip.nx + i]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.strip.nx;
        &self.values[j * nx..(j + 1) * nx]
    }

    /// Bottom row, `y = 0`.
    pub fn trace(&self) -> &[f64] {
        self.row(0)
    }

    /// Top row, `y = Y`.
    pub fn cap(&self) -> &[f64] {
        self.row(self.strip.ny + 1)
    }

    /// Little-endian binary: 8-byte magic, `nx`, `ny` as u64, `L`, `Y`, `a`,
    /// `q` as f64, then the values in row-major order with `y` outer.
    pub fn to_bytes(&self) -> Vec<u8> {
        let s = &self.strip;
        let mut out = Vec::with_capacity(56 + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(s.nx as u64).to_le_bytes());
        out.extend_from_slice(&(s.ny as u64).to_le_bytes());
        for v in [s.period, s.height, s.a, s.grading] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 56 || &bytes[..8] != MAGIC {
            return Err(Error::Format("not a grid field file (bad magic or short header)".into()));
        }
        let word = |k: usize| -> [u8; 8] { bytes[8 + 8 * k..16 + 8 * k].try_into().expect("8 bytes") };
        let nx = u64::from_le_bytes(word(0)) as usize;
        let ny = u64::from_le_bytes(word(1)) as usize;
        let [l, y, a, q] = [2, 3, 4, 5].map(|k| f64::from_le_bytes(word(k)));
        let strip = HalfStrip::with_grading(l, y, nx, ny, a, q)?;
        let body = &bytes[56..];
        let count = nx * (ny + 2);
        if body.len() != 8 * count {
            return Err(Error::Format(format!(
                "expected {} value bytes, found {}",
                8 * count,
                body.len()
            )));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Self::new(strip, values)
    }

    /// One header line `# nx=..,ny=..,L=..,Y=..,a=..,q=..`, then one line of
    /// `nx` comma-separated values per row, bottom row first.
    pub fn to_csv(&self) -> String {
        let s = &self.strip;
        let mut out = format!(
            "# nx={},ny={},L={:e},Y={:e},a={:e},q={:e}\n",
            s.nx, s.ny, s.period, s.height, s.a, s.grading
        );
        for j in 0..s.rows() {
            let line: Vec<String> = self.row(j).iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .and_then(|h| h.strip_prefix('#'))
            .ok_or_else(|| Error::Format("missing '#' header line".into()))?;
        let mut fields = std::collections::HashMap::new();
        for kv in header.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header entry '{kv}'")))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&String> {
            fields
                .get(k)
                .ok_or_else(|| Error::Format(format!("header lacks '{k}'")))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("header '{k}': {e}")))
        };
        let count = |k: &str| -> Result<usize> {
            get(k)?
                .parse::<usize>()
                .map_err(|e| Error::Format(format!("header '{k}': {e}")))
        };
        let q = if fields.contains_key("q") { num("q")? } else { default_grading(num("a")?) };
        let strip = HalfStrip::with_grading(num("L")?, num("Y")?, count("nx")?, count("ny")?, num("a")?, q)?;
        let mut values = Vec::with_capacity(strip.nx * strip.rows());
        for (r, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(format!("row {r}: {e}")))?;
            if row.len() != strip.nx {
                return Err(Error::Format(format!("row {r} has {} values, expected {}", row.len(), strip.nx)));
            }
            values.extend(row);
        }
        Self::new(strip, values)
    }

    /// Binary when the extension is `.bin`, CSV otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = if is_binary(path) {
            self.to_bytes()
        } else {
            self.to_csv().into_bytes()
        };
        write_atomic(path, &bytes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| io_error(path, e))?;
        if is_binary(path) {
            Self::from_bytes(&bytes)
        } else {
            let text = String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?;
            Self::from_csv(&text)
        }
    }
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

pub(crate) fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    }
}

/// Write to a sibling temporary file, then rename over `path`.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_error(path, e));
    }
    Ok(())
}
