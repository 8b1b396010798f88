//! Binary checkpoint container.
//!
//! All integers and floats are little-endian. Field order:
//!
//! ```text
//! magic        8 bytes  "NOMACKPT"
//! version      u32      1
//! seed         u64
//! config_len   u32      followed by config_len bytes of UTF-8 TOML
//! codec        u8       0 reduced, 1 unreduced
//! net_count    u32      2 (actor, critic)
//! per net:
//!   arch       u8       0 single hidden layer, 1 D2RL
//!   width      u32
//!   depth      u32
//!   input_dim  u32
//!   output_dim u32
//!   layers     u32
//!   per layer:
//!     rows     u32
//!     cols     u32
//!     weight   rows * cols f64, row-major
//!     bias     rows f64
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use ndarray::{Array1, Array2};

use crate::config::Config;
use crate::env::observation_len;
use crate::error::{Error, Result};

use super::agent::{Codec, PpoAgent};
use super::net::{Architecture, Dense, Mlp};

pub const MAGIC: &[u8; 8] = b"NOMACKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub config: Config,
    pub seed: u64,
    pub agent: PpoAgent,
}

pub fn save(path: &Path, cfg: &Config, seed: u64, agent: &PpoAgent) -> Result<()> {
    let io = |e| Error::io(path, e);
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_to(&mut w, cfg, seed, agent).map_err(io)?;
    w.flush().map_err(io)
}

pub fn write_to(w: &mut impl Write, cfg: &Config, seed: u64, agent: &PpoAgent) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_u32::<LE>(VERSION)?;
    w.write_u64::<LE>(seed)?;
    let toml = cfg.to_toml_string();
    w.write_u32::<LE>(toml.len() as u32)?;
    w.write_all(toml.as_bytes())?;
    w.write_u8(if agent.codec().is_reduced() { 0 } else { 1 })?;
    w.write_u32::<LE>(2)?;
    for net in [agent.actor(), agent.critic()] {
        let arch = net.architecture();
        w.write_u8(match arch {
            Architecture::SingleLayer { .. } => 0,
            Architecture::D2rl { .. } => 1,
        })?;
        w.write_u32::<LE>(arch.width() as u32)?;
        w.write_u32::<LE>(arch.depth() as u32)?;
        w.write_u32::<LE>(net.input_dim() as u32)?;
        w.write_u32::<LE>(net.output_dim() as u32)?;
        w.write_u32::<LE>(net.layers().len() as u32)?;
        for layer in net.layers() {
            w.write_u32::<LE>(layer.outputs() as u32)?;
            w.write_u32::<LE>(layer.inputs() as u32)?;
            for &x in layer.weight.iter().chain(layer.bias.iter()) {
                w.write_f64::<LE>(x)?;
            }
        }
    }
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(&mut BufReader::new(file))
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

pub fn read_from(r: &mut impl Read) -> Result<Checkpoint> {
    let truncated = |e: std::io::Error| bad(format!("truncated or unreadable: {e}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(bad("not a checkpoint file"));
    }
    let version = r.read_u32::<LE>().map_err(truncated)?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let seed = r.read_u64::<LE>().map_err(truncated)?;
    let len = r.read_u32::<LE>().map_err(truncated)? as usize;
    let mut text = vec![0u8; len];
    r.read_exact(&mut text).map_err(truncated)?;
    let text = String::from_utf8(text).map_err(|_| bad("config is not UTF-8"))?;
    let config = Config::from_toml_str(&text).map_err(|e| bad(format!("config: {e}")))?;
    let reduced = match r.read_u8().map_err(truncated)? {
        0 => true,
        1 => false,
        t => return Err(bad(format!("unknown codec tag {t}"))),
    };
    let count = r.read_u32::<LE>().map_err(truncated)?;
    if count != 2 {
        return Err(bad(format!("expected 2 networks, found {count}")));
    }
    let actor = read_net(r).map_err(|e| match e {
        Error::Checkpoint(m) => bad(format!("actor: {m}")),
        other => other,
    })?;
    let critic = read_net(r)?;
    let codec = Codec::new(reduced, config.system.n_ues, config.system.n_channels)?;
    let sys = &config.system;
    let obs_len = observation_len(sys.n_ues, sys.n_channels, sys.obs_history);
    let agent = PpoAgent::from_parts(actor, critic, codec, obs_len)?;
    Ok(Checkpoint { config, seed, agent })
}

fn read_net(r: &mut impl Read) -> Result<Mlp> {
    let truncated = |e: std::io::Error| bad(format!("truncated: {e}"));
    let tag = r.read_u8().map_err(truncated)?;
    let mut u = || r.read_u32::<LE>().map(|v| v as usize).map_err(truncated);
    let (width, depth, _input, _output, n_layers) = (u()?, u()?, u()?, u()?, u()?);
    let arch = match tag {
        0 => Architecture::SingleLayer { width },
        1 => Architecture::D2rl { width, depth },
        t => return Err(bad(format!("unknown architecture tag {t}"))),
    };
    if n_layers > 64 {
        return Err(bad(format!("implausible layer count {n_layers}")));
    }
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let rows = r.read_u32::<LE>().map_err(truncated)? as usize;
        let cols = r.read_u32::<LE>().map_err(truncated)? as usize;
        let mut weight = vec![0.0; rows * cols];
        r.read_f64_into::<LE>(&mut weight).map_err(truncated)?;
        let mut bias = vec![0.0; rows];
        r.read_f64_into::<LE>(&mut bias).map_err(truncated)?;
        layers.push(Dense {
            weight: Array2::from_shape_vec((rows, cols), weight).expect("length matches shape"),
            bias: Array1::from(bias),
        });
    }
    Mlp::from_layers(arch, layers).ok_or_else(|| bad("layer shapes do not match the architecture"))
}
