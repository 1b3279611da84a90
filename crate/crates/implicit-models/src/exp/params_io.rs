//! Versioned text archives for model parameters: one header line with the
//! format version, model kind and dimensions, then named blocks of decimal
//! reals at 17 significant digits (enough to reproduce every f64 bit-exactly).

use crate::error::{Error, Result};
use crate::seg::{GenColorParams, SegCrfParams};
use crate::synthetic::{ClassGauss, QuadLogReg, NUM_CLASSES};
use std::fmt::Write as _;
use std::path::Path;

const MAGIC: &str = "implicit-params";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamArchive {
    pub kind: String,
    pub dims: Vec<usize>,
    pub blocks: Vec<(String, Vec<f64>)>,
}

impl ParamArchive {
    pub fn block(&self, name: &str) -> Result<&[f64]> {
        self.blocks
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::Format(format!("missing block {name:?}")))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC} {VERSION} {}", self.kind);
        for d in &self.dims {
            let _ = write!(out, " {d}");
        }
        out.push('\n');
        for (name, values) in &self.blocks {
            let _ = write!(out, "{name} {}", values.len());
            for v in values {
                let _ = write!(out, " {v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty archive".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(Error::Format("not a parameter archive".into()));
        }
        let version: u32 = parts
            .next()
            .ok_or_else(|| Error::Format("missing version".into()))?
            .parse()
            .map_err(|_| Error::Format("bad version".into()))?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported archive version {version}, expected {VERSION}"
            )));
        }
        let kind = parts
            .next()
            .ok_or_else(|| Error::Format("missing model kind".into()))?
            .to_string();
        let dims: Vec<usize> = parts
            .map(|p| p.parse().map_err(|_| Error::Format("bad dimension".into())))
            .collect::<Result<_>>()?;
        let mut blocks = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| Error::Format("missing block name".into()))?
                .to_string();
            let len: usize = parts
                .next()
                .ok_or_else(|| Error::Format("missing block length".into()))?
                .parse()
                .map_err(|_| Error::Format("bad block length".into()))?;
            let values: Vec<f64> = parts
                .map(|p| p.parse().map_err(|_| Error::Format(format!("bad value in {name}"))))
                .collect::<Result<_>>()?;
            if values.len() != len {
                return Err(Error::Format(format!(
                    "block {name}: declared {len} values, found {}",
                    values.len()
                )));
            }
            blocks.push((name, values));
        }
        Ok(Self { kind, dims, blocks })
    }
}

pub fn save_params(path: &Path, archive: &ParamArchive) -> Result<()> {
    std::fs::write(path, archive.to_text())?;
    Ok(())
}

pub fn load_params(path: &Path) -> Result<ParamArchive> {
    ParamArchive::from_text(&std::fs::read_to_string(path)?)
}

pub fn quad_logreg_to_archive(model: &QuadLogReg) -> ParamArchive {
    use crate::expfam::ExpFamConditional as _;
    let p = model.params();
    let pick = |off: usize| (0..NUM_CLASSES).map(|y| p[3 * y + off]).collect();
    ParamArchive {
        kind: "quad-logreg".into(),
        dims: vec![NUM_CLASSES],
        blocks: vec![
            ("a".into(), pick(0)),
            ("b".into(), pick(1)),
            ("c".into(), pick(2)),
        ],
    }
}

pub fn quad_logreg_from_archive(archive: &ParamArchive) -> Result<QuadLogReg> {
    if archive.kind != "quad-logreg" || archive.dims != [NUM_CLASSES] {
        return Err(Error::Format(format!(
            "expected quad-logreg over {NUM_CLASSES} classes, got {} {:?}",
            archive.kind, archive.dims
        )));
    }
    let (a, b, c) = (
        archive.block("a")?,
        archive.block("b")?,
        archive.block("c")?,
    );
    if a.len() != NUM_CLASSES || b.len() != NUM_CLASSES || c.len() != NUM_CLASSES {
        return Err(Error::Format("block size mismatch".into()));
    }
    let mut params = vec![0.0; 3 * NUM_CLASSES];
    for y in 0..NUM_CLASSES {
        params[3 * y] = a[y];
        params[3 * y + 1] = b[y];
        params[3 * y + 2] = c[y];
    }
    QuadLogReg::from_params(params)
}

pub fn class_gauss_to_archive(model: &ClassGauss) -> ParamArchive {
    ParamArchive {
        kind: "class-gauss".into(),
        dims: vec![NUM_CLASSES, usize::from(model.shared_d())],
        blocks: vec![
            ("d".into(), (0..NUM_CLASSES).map(|y| model.d(y)).collect()),
            ("e".into(), (0..NUM_CLASSES).map(|y| model.e(y)).collect()),
        ],
    }
}

pub fn class_gauss_from_archive(archive: &ParamArchive) -> Result<ClassGauss> {
    if archive.kind != "class-gauss" || archive.dims.len() != 2 {
        return Err(Error::Format("expected a class-gauss archive".into()));
    }
    let shared = archive.dims[1] != 0;
    let (d, e) = (archive.block("d")?, archive.block("e")?);
    if d.len() != NUM_CLASSES || e.len() != NUM_CLASSES {
        return Err(Error::Format("block size mismatch".into()));
    }
    let mut params = vec![0.0; 2 * NUM_CLASSES];
    for y in 0..NUM_CLASSES {
        params[2 * y] = d[y];
        params[2 * y + 1] = e[y];
    }
    ClassGauss::from_params(params, shared)
}

const EDGE_BLOCKS: [&str; 4] = ["h", "v", "dd", "du"];

pub fn seg_crf_to_archive(model: &SegCrfParams) -> ParamArchive {
    let labels = model.num_labels();
    let ll = labels * labels;
    let p = model.params();
    let mut blocks = vec![("q".into(), p[..ll].to_vec())];
    for (t, tag) in EDGE_BLOCKS.iter().enumerate() {
        blocks.push((
            format!("a_{tag}"),
            p[ll + t * ll..ll + (t + 1) * ll].to_vec(),
        ));
    }
    for (t, tag) in EDGE_BLOCKS.iter().enumerate() {
        blocks.push((
            format!("b_{tag}"),
            p[ll * 5 + t * ll..ll * 5 + (t + 1) * ll].to_vec(),
        ));
    }
    ParamArchive {
        kind: "seg-crf".into(),
        dims: vec![labels],
        blocks,
    }
}

pub fn seg_crf_from_archive(archive: &ParamArchive) -> Result<SegCrfParams> {
    if archive.kind != "seg-crf" || archive.dims.len() != 1 {
        return Err(Error::Format("expected a seg-crf archive".into()));
    }
    let labels = archive.dims[0];
    let ll = labels * labels;
    let mut params = Vec::with_capacity(9 * ll);
    let q = archive.block("q")?;
    if q.len() != ll {
        return Err(Error::Format("q block size mismatch".into()));
    }
    params.extend_from_slice(q);
    for prefix in ["a", "b"] {
        for tag in EDGE_BLOCKS {
            let block = archive.block(&format!("{prefix}_{tag}"))?;
            if block.len() != ll {
                return Err(Error::Format(format!(
                    "{prefix}_{tag} block size mismatch"
                )));
            }
            params.extend_from_slice(block);
        }
    }
    SegCrfParams::from_params(labels, params)
}

pub fn gen_color_to_archive(model: &GenColorParams) -> ParamArchive {
    let (labels, palette) = (model.num_labels(), model.palette_size());
    let p = model.params();
    let lg = labels * palette;
    ParamArchive {
        kind: "gen-color".into(),
        dims: vec![labels, palette],
        blocks: vec![
            ("h".into(), p[..lg].to_vec()),
            ("c".into(), vec![p[lg]]),
            ("d".into(), p[lg + 1..lg + 1 + 3 * palette].to_vec()),
            ("e".into(), vec![p[p.len() - 1]]),
        ],
    }
}

pub fn gen_color_from_archive(archive: &ParamArchive) -> Result<GenColorParams> {
    if archive.kind != "gen-color" || archive.dims.len() != 2 {
        return Err(Error::Format("expected a gen-color archive".into()));
    }
    let (labels, palette) = (archive.dims[0], archive.dims[1]);
    let mut params = Vec::new();
    params.extend_from_slice(archive.block("h")?);
    params.extend_from_slice(archive.block("c")?);
    params.extend_from_slice(archive.block("d")?);
    params.extend_from_slice(archive.block("e")?);
    GenColorParams::from_params(labels, palette, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expfam::ExpFamConditional as _;
    use crate::rng::RngStream;

    #[test]
    fn empty_archive_is_header_only() {
        let archive = ParamArchive {
            kind: "quad-logreg".into(),
            dims: vec![3],
            blocks: vec![],
        };
        let text = archive.to_text();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(ParamArchive::from_text(&text).unwrap(), archive);
    }

    #[test]
    fn quad_logreg_round_trip_bit_exact() {
        let mut rng = RngStream::new(81);
        for _ in 0..50 {
            let params: Vec<f64> = (0..9).map(|_| 1e3 * rng.normal()).collect();
            let model = QuadLogReg::from_params(params.clone()).unwrap();
            let back = quad_logreg_from_archive(&quad_logreg_to_archive(&model)).unwrap();
            assert_eq!(back.params(), model.params());
        }
    }

    #[test]
    fn class_gauss_round_trip_preserves_flag() {
        let model =
            ClassGauss::from_params(vec![-0.5, 0.25, -0.5, -1.0, -0.5, 3.0], true).unwrap();
        let back = class_gauss_from_archive(&class_gauss_to_archive(&model)).unwrap();
        assert_eq!(back.params(), model.params());
        assert!(back.shared_d());
    }

    #[test]
    fn seg_crf_archive_declares_nine_blocks_of_l_squared() {
        let mut rng = RngStream::new(82);
        let mut model = SegCrfParams::zeros(3);
        for v in model.params_mut() {
            *v = rng.normal();
        }
        let archive = seg_crf_to_archive(&model);
        assert_eq!(archive.blocks.len(), 9);
        for (_, block) in &archive.blocks {
            assert_eq!(block.len(), 9);
        }
        let total: usize = archive.blocks.iter().map(|(_, b)| b.len()).sum();
        assert_eq!(total, 81);
        let back = seg_crf_from_archive(&archive).unwrap();
        assert_eq!(back.params(), model.params());
    }

    #[test]
    fn gen_color_round_trip() {
        let mut rng = RngStream::new(83);
        let mut model = GenColorParams::standard(3, 8);
        for v in model.params_mut() {
            *v += 0.1 * rng.normal();
        }
        model.project();
        let back = gen_color_from_archive(&gen_color_to_archive(&model)).unwrap();
        assert_eq!(back.params(), model.params());
    }

    #[test]
    fn version_and_dimension_mismatches_are_descriptive() {
        let text = "implicit-params 9 quad-logreg 3\n";
        let err = ParamArchive::from_text(text).unwrap_err();
        assert!(err.to_string().contains("version"));
        let archive = ParamArchive {
            kind: "quad-logreg".into(),
            dims: vec![4],
            blocks: vec![],
        };
        assert!(quad_logreg_from_archive(&archive).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join("implicit_models_params_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.params");
        let model = QuadLogReg::from_params(vec![
            0.1,
            -2.5e-17,
            3.33333333333333337,
            1.0 / 3.0,
            2e300,
            -7.0,
            0.0,
            -0.0,
            42.0,
        ])
        .unwrap();
        save_params(&path, &quad_logreg_to_archive(&model)).unwrap();
        let back = quad_logreg_from_archive(&load_params(&path).unwrap()).unwrap();
        for (a, b) in back.params().iter().zip(model.params()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
