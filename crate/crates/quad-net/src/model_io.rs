//! Model file format: a plain-text header followed by base64 matrix blocks.
//!
//! Floats are serialized as little-endian IEEE-754 bytes and scales as raw
//! bit patterns, so a written model reloads bit-identically.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use ndarray::{Array1, Array2};

use crate::error::QuadNetError;
use crate::params::{PlaintextPart, QuadNetParams, OUTPUTS, PLAINTEXT_HIDDEN};
use crate::quantize::QuantizedEncryptedPart;

pub const FORMAT_VERSION: u32 = 1;

/// On-disk model: float parameters, optional quantized encrypted part, and
/// training provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub params: QuadNetParams,
    pub quantized: Option<QuantizedEncryptedPart>,
    pub train_seed: u64,
    pub config_digest: String,
}

impl ModelFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version: {FORMAT_VERSION}");
        let _ = writeln!(out, "kind: quadnet-model");
        let _ = writeln!(out, "n: {}", self.params.n());
        let _ = writeln!(out, "d: {}", self.params.d());
        let _ = writeln!(out, "t: {}", self.params.t());
        let _ = writeln!(out, "l: {OUTPUTS}");
        let _ = writeln!(out, "train_seed: {}", self.train_seed);
        let _ = writeln!(out, "config_digest: {}", self.config_digest);
        match &self.quantized {
            Some(qp) => {
                let _ = writeln!(out, "quantized: true");
                let _ = writeln!(out, "bit_width: {}", qp.bit_width);
                let _ = writeln!(out, "scale_p_bits: {:016x}", qp.scale_p.to_bits());
                let _ = writeln!(out, "scale_w2_bits: {:016x}", qp.scale_w2.to_bits());
            }
            None => {
                let _ = writeln!(out, "quantized: false");
            }
        }
        write_f64_matrix(&mut out, "p", &self.params.p);
        write_f64_matrix(&mut out, "w2", &self.params.w2);
        write_f64_matrix(&mut out, "w3", &self.params.plaintext.w3);
        write_f64_vector(&mut out, "b3", &self.params.plaintext.b3);
        write_f64_matrix(&mut out, "w4", &self.params.plaintext.w4);
        write_f64_vector(&mut out, "b4", &self.params.plaintext.b4);
        if let Some(qp) = &self.quantized {
            write_i32_matrix(&mut out, "p_q", &qp.p_q);
            write_i32_matrix(&mut out, "w2_q", &qp.w2_q);
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), QuadNetError> {
        fs::write(path, self.render()).map_err(|e| QuadNetError::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<ModelFile, QuadNetError> {
        let text =
            fs::read_to_string(path).map_err(|e| QuadNetError::io(path.display().to_string(), e))?;
        parse_model(&path.display().to_string(), &text)
    }
}

fn encode_block(out: &mut String, name: &str, rows: usize, cols: usize, bytes: &[u8]) {
    let _ = writeln!(out, "matrix {name} {rows} {cols}");
    let encoded = B64.encode(bytes);
    for chunk in encoded.as_bytes().chunks(76) {
        let _ = writeln!(out, "{}", std::str::from_utf8(chunk).expect("base64 is ASCII"));
    }
    let _ = writeln!(out, "end");
}

fn write_f64_matrix(out: &mut String, name: &str, m: &Array2<f64>) {
    let mut bytes = Vec::with_capacity(m.len() * 8);
    for &v in m.iter() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    encode_block(out, name, m.nrows(), m.ncols(), &bytes);
}

fn write_f64_vector(out: &mut String, name: &str, v: &Array1<f64>) {
    let mut bytes = Vec::with_capacity(v.len() * 8);
    for &x in v.iter() {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    encode_block(out, name, 1, v.len(), &bytes);
}

fn write_i32_matrix(out: &mut String, name: &str, m: &Array2<i32>) {
    let mut bytes = Vec::with_capacity(m.len() * 4);
    for &v in m.iter() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    encode_block(out, name, m.nrows(), m.ncols(), &bytes);
}

struct Parser<'a> {
    path: &'a str,
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, line: usize, reason: impl Into<String>) -> QuadNetError {
        QuadNetError::format(self.path, line, reason)
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos];
            self.pos += 1;
            if !line.is_empty() {
                return Some((self.pos, line));
            }
        }
        None
    }

    fn header(&mut self, key: &str) -> Result<&'a str, QuadNetError> {
        let (lineno, line) = self
            .next_line()
            .ok_or_else(|| self.err(self.pos, format!("missing header {key}")))?;
        line.strip_prefix(&format!("{key}: "))
            .ok_or_else(|| self.err(lineno, format!("expected header {key:?}, found {line:?}")))
    }

    fn header_parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, QuadNetError> {
        let lineno = self.pos + 1;
        let raw = self.header(key)?;
        raw.trim().parse().map_err(|_| self.err(lineno, format!("bad value for {key}: {raw:?}")))
    }

    fn matrix_block(&mut self, name: &str) -> Result<(usize, usize, Vec<u8>), QuadNetError> {
        let (lineno, line) = self
            .next_line()
            .ok_or_else(|| self.err(self.pos, format!("missing matrix {name}")))?;
        let parts: Vec<&str> = line.split(' ').collect();
        if parts.len() != 4 || parts[0] != "matrix" || parts[1] != name {
            return Err(self.err(lineno, format!("expected 'matrix {name} <rows> <cols>', found {line:?}")));
        }
        let rows: usize =
            parts[2].parse().map_err(|_| self.err(lineno, "bad row count"))?;
        let cols: usize =
            parts[3].parse().map_err(|_| self.err(lineno, "bad column count"))?;
        let mut encoded = String::new();
        let mut last_line;
        loop {
            let (lineno, line) = self
                .next_line()
                .ok_or_else(|| self.err(self.pos, format!("matrix {name} missing 'end'")))?;
            last_line = lineno;
            if line == "end" {
                break;
            }
            if line.len() > 76 * 2 {
                return Err(self.err(lineno, "oversized base64 line"));
            }
            encoded.push_str(line);
        }
        let bytes = B64
            .decode(encoded.as_bytes())
            .map_err(|e| self.err(last_line, format!("bad base64 in matrix {name}: {e}")))?;
        Ok((rows, cols, bytes))
    }

    fn f64_matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Array2<f64>, QuadNetError> {
        let lineno = self.pos + 1;
        let (r, c, bytes) = self.matrix_block(name)?;
        if r != rows || c != cols {
            return Err(self.err(lineno, format!("matrix {name}: expected {rows}x{cols}, found {r}x{c}")));
        }
        if bytes.len() != rows * cols * 8 {
            return Err(self.err(lineno, format!("matrix {name}: payload size mismatch")));
        }
        let values: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of 8")))
            .collect();
        for v in &values {
            if v.is_nan() {
                return Err(self.err(lineno, format!("matrix {name}: NaN entry")));
            }
        }
        Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| self.err(lineno, format!("matrix {name}: {e}")))
    }

    fn f64_vector(&mut self, name: &str, len: usize) -> Result<Array1<f64>, QuadNetError> {
        let m = self.f64_matrix(name, 1, len)?;
        Ok(m.row(0).to_owned())
    }

    fn i32_matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Array2<i32>, QuadNetError> {
        let lineno = self.pos + 1;
        let (r, c, bytes) = self.matrix_block(name)?;
        if r != rows || c != cols {
            return Err(self.err(lineno, format!("matrix {name}: expected {rows}x{cols}, found {r}x{c}")));
        }
        if bytes.len() != rows * cols * 4 {
            return Err(self.err(lineno, format!("matrix {name}: payload size mismatch")));
        }
        let values: Vec<i32> = bytes
            .chunks_exact(4)
            .map(|b| i32::from_le_bytes(b.try_into().expect("chunk of 4")))
            .collect();
        Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| self.err(lineno, format!("matrix {name}: {e}")))
    }
}

fn parse_model(path: &str, text: &str) -> Result<ModelFile, QuadNetError> {
    let mut p = Parser { path, lines: text.lines().collect(), pos: 0 };

    let version: u32 = p.header_parse("format_version")?;
    if version != FORMAT_VERSION {
        return Err(p.err(1, format!("unsupported format_version {version}")));
    }
    let kind = p.header("kind")?;
    if kind.trim() != "quadnet-model" {
        return Err(p.err(2, format!("expected kind quadnet-model, found {kind:?}")));
    }
    let n: usize = p.header_parse("n")?;
    let d: usize = p.header_parse("d")?;
    let t: usize = p.header_parse("t")?;
    let l: usize = p.header_parse("l")?;
    if l != OUTPUTS {
        return Err(p.err(6, format!("unsupported output count {l}")));
    }
    let train_seed: u64 = p.header_parse("train_seed")?;
    let config_digest = p.header("config_digest")?.trim().to_string();
    let quantized_flag = p.header("quantized")?.trim().to_string();
    let quant_meta = match quantized_flag.as_str() {
        "true" => {
            let bit_width: u8 = p.header_parse("bit_width")?;
            if bit_width != 4 && bit_width != 8 {
                return Err(p.err(p.pos, format!("unsupported bit_width {bit_width}")));
            }
            let scale_p = parse_scale(&mut p, "scale_p_bits")?;
            let scale_w2 = parse_scale(&mut p, "scale_w2_bits")?;
            Some((bit_width, scale_p, scale_w2))
        }
        "false" => None,
        other => return Err(p.err(p.pos, format!("bad quantized flag {other:?}"))),
    };

    let params = QuadNetParams {
        p: p.f64_matrix("p", d, n + 1)?,
        w2: p.f64_matrix("w2", t, d)?,
        plaintext: PlaintextPart {
            w3: p.f64_matrix("w3", PLAINTEXT_HIDDEN, t)?,
            b3: p.f64_vector("b3", PLAINTEXT_HIDDEN)?,
            w4: p.f64_matrix("w4", OUTPUTS, PLAINTEXT_HIDDEN)?,
            b4: p.f64_vector("b4", OUTPUTS)?,
        },
    };
    params.check_shapes()?;

    let quantized = match quant_meta {
        Some((bit_width, scale_p, scale_w2)) => {
            let p_q = p.i32_matrix("p_q", d, n + 1)?;
            let w2_q = p.i32_matrix("w2_q", t, d)?;
            let cap = QuantizedEncryptedPart::max_level(bit_width);
            for (name, m) in [("p_q", &p_q), ("w2_q", &w2_q)] {
                if m.iter().any(|&v| v.abs() > cap) {
                    return Err(QuadNetError::format(
                        path,
                        0,
                        format!("matrix {name}: entry exceeds {bit_width}-bit range"),
                    ));
                }
            }
            Some(QuantizedEncryptedPart { p_q, w2_q, scale_p, scale_w2, bit_width })
        }
        None => None,
    };

    if p.next_line().is_some() {
        return Err(QuadNetError::format(path, p.pos, "trailing content after model"));
    }
    Ok(ModelFile { params, quantized, train_seed, config_digest })
}

fn parse_scale(p: &mut Parser, key: &str) -> Result<f64, QuadNetError> {
    let lineno = p.pos + 1;
    let raw = p.header(key)?.trim().to_string();
    let bits = u64::from_str_radix(&raw, 16)
        .map_err(|_| p.err(lineno, format!("bad {key}: {raw:?}")))?;
    let value = f64::from_bits(bits);
    if !value.is_finite() || value <= 0.0 {
        return Err(p.err(lineno, format!("{key} must decode to a positive finite scale")));
    }
    Ok(value)
}
