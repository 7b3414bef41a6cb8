use std::path::Path;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AgentError, QNetwork, TrainConfig};
use crate::env::Mode;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"NAVSIMQN";
pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

/// Generator states needed to continue a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngState {
    pub env: ChaCha8Rng,
    pub agent: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub schema_version: u32,
    pub layer_widths: Vec<usize>,
    pub activation: String,
    pub output_activation: String,
    /// Parameter layout after the header.
    pub layout: String,
    pub parameter_count: usize,
    /// Environment steps taken so far.
    pub training_step: u64,
    pub updates: u64,
    pub episodes: usize,
    pub config: Option<TrainConfig>,
    pub rng: Option<RngState>,
}

/// Network weights plus the metadata needed to use or resume them.
///
/// File layout: 8-byte magic, u64 little-endian header length, the JSON
/// header, then every parameter as a little-endian f64, layer by layer,
/// weights (row-major, `out × in`) before biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub network: QNetwork,
}

impl Checkpoint {
    pub fn new(network: QNetwork, config: Option<TrainConfig>) -> Self {
        Self {
            header: CheckpointHeader {
                schema_version: CHECKPOINT_SCHEMA_VERSION,
                layer_widths: network.widths(),
                activation: "tanh".into(),
                output_activation: "linear".into(),
                layout: "f64-le; per layer weights[out][in] then biases[out]".into(),
                parameter_count: network.parameter_count(),
                training_step: 0,
                updates: 0,
                episodes: 0,
                config,
                rng: None,
            },
            network,
        }
    }

    /// Observation mode the network was built for.
    pub fn mode(&self) -> Option<Mode> {
        if let Some(c) = &self.header.config {
            return Some(c.mode);
        }
        [Mode::Static, Mode::Dynamic]
            .into_iter()
            .find(|m| m.obs_dim() == self.network.input_dim())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header).expect("header serializes");
        let mut out = Vec::with_capacity(16 + header.len() + 8 * self.network.parameter_count());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        for p in self.network.parameters() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AgentError> {
        let bad = |m: &str| AgentError::Checkpoint(m.to_string());
        if bytes.len() < 16 || &bytes[..8] != CHECKPOINT_MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let body = bytes
            .get(16..)
            .filter(|b| b.len() >= hlen)
            .ok_or_else(|| bad("truncated header"))?;
        let header: CheckpointHeader = serde_json::from_slice(&body[..hlen])
            .map_err(|e| AgentError::Checkpoint(e.to_string()))?;
        if header.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(AgentError::Checkpoint(format!(
                "unsupported schema version {}",
                header.schema_version
            )));
        }
        if header.activation != "tanh" || header.output_activation != "linear" {
            return Err(bad("unsupported activation"));
        }
        let mut network = QNetwork::zeros(&header.layer_widths)?;
        let data = &body[hlen..];
        if header.parameter_count != network.parameter_count()
            || data.len() != 8 * network.parameter_count()
        {
            return Err(bad("parameter block does not match the layer widths"));
        }
        for (p, chunk) in network.parameters_mut().zip(data.chunks_exact(8)) {
            *p = f64::from_le_bytes(chunk.try_into().unwrap());
        }
        if network.parameters().any(|p| !p.is_finite()) {
            return Err(bad("non-finite parameter"));
        }
        Ok(Self { header, network })
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| AgentError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let bytes = std::fs::read(path).map_err(|e| AgentError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sample() -> Checkpoint {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let net = QNetwork::new(&[7, 16, 16, 5], &mut rng).unwrap();
        let mut c = Checkpoint::new(net, Some(TrainConfig::defaults(Mode::Static)));
        c.header.training_step = 1234;
        c.header.updates = 123;
        c.header.episodes = 10;
        let mut agent = ChaCha8Rng::seed_from_u64(5);
        agent.set_stream(2);
        let _: u64 = rand::Rng::gen(&mut agent);
        c.header.rng = Some(RngState { env: rng, agent });
        c
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = sample();
        let back = Checkpoint::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back, c);
        let x = [0.3, -1.0, 5.0, 0.01, 25.0, 0.0, 0.0];
        let a = c.network.forward(&x).unwrap();
        let b = back.network.forward(&x).unwrap();
        assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
        assert_eq!(back.to_bytes(), c.to_bytes());
    }

    #[test]
    fn weights_are_little_endian_in_layer_order() {
        let mut net = QNetwork::zeros(&[2, 1]).unwrap();
        net.layers_mut()[0].weights = vec![1.5, -2.0];
        net.layers_mut()[0].biases = vec![0.25];
        let bytes = Checkpoint::new(net, None).to_bytes();
        let tail = &bytes[bytes.len() - 24..];
        assert_eq!(&tail[..8], &1.5f64.to_le_bytes());
        assert_eq!(&tail[8..16], &(-2.0f64).to_le_bytes());
        assert_eq!(&tail[16..], &0.25f64.to_le_bytes());
    }

    #[test]
    fn corrupt_files_rejected() {
        let bytes = sample().to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(Checkpoint::from_bytes(b"NOTACKPT").is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad).is_err());
    }

    #[test]
    fn mode_inferred_without_config() {
        let net = QNetwork::zeros(&[9, 4, 5]).unwrap();
        assert_eq!(Checkpoint::new(net, None).mode(), Some(Mode::Dynamic));
    }
}
