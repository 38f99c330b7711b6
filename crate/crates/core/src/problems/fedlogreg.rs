//! Synthetic federated logistic regression: one objective per client.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{MooError, Result};
use crate::problem::Problem;
use crate::rng::{normal_vec, stream, Purpose};
use crate::types::Jacobian;

/// How client datasets differ from each other.
#[derive(Debug, Clone, PartialEq)]
pub enum Heterogeneity {
    /// Class means of client k are rotated by `angles_deg[k]` in the first
    /// two feature coordinates.
    Rotation { angles_deg: Vec<f64> },
    /// Data comes from ten labelled Gaussian clusters; each client only sees
    /// `classes` of them.
    PartialClass { classes: usize },
}

impl Heterogeneity {
    /// 70% of clients unrotated, 20% at 90°, the rest at 180°.
    pub fn default_rotation(clients: usize) -> Self {
        let n90 = (0.7 * clients as f64).round() as usize;
        let n180 = (0.9 * clients as f64).round() as usize;
        let angles_deg = (0..clients)
            .map(|k| {
                if k < n90 {
                    0.0
                } else if k < n180 {
                    90.0
                } else {
                    180.0
                }
            })
            .collect();
        Heterogeneity::Rotation { angles_deg }
    }
}

const CLUSTERS: usize = 10;

/// Generation parameters for [`FedLogReg::generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct FedSpec {
    pub clients: usize,
    pub samples_per_client: usize,
    pub features: usize,
    pub heterogeneity: Heterogeneity,
    /// Distance of each class mean from the origin.
    pub separation: f64,
    /// Rotation mode: share of the squared class-mean length placed on the
    /// coordinates outside the rotated (x_1, x_2) plane, which every client
    /// has in common.
    pub shared: f64,
    pub noise: f64,
    pub reg: f64,
    /// Minibatch size for stochastic gradients; `None` uses the full client set.
    pub batch_size: Option<usize>,
}

impl FedSpec {
    pub fn new(clients: usize, heterogeneity: Heterogeneity) -> Self {
        FedSpec {
            clients,
            samples_per_client: 200,
            features: 5,
            heterogeneity,
            // small feature scale keeps training in progress over a few
            // hundred rounds at local rate 0.1
            separation: 0.375,
            shared: 0.5,
            noise: 0.25,
            reg: 1e-3,
            batch_size: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clients == 0 {
            return Err(MooError::invalid("need at least one client"));
        }
        if self.samples_per_client < 10 {
            return Err(MooError::invalid("need at least 10 samples per client"));
        }
        if self.features < 2 {
            return Err(MooError::invalid("need at least 2 features"));
        }
        if !(self.reg >= 0.0 && self.noise > 0.0 && self.separation.is_finite() && self.noise.is_finite()) {
            return Err(MooError::invalid("reg must be >= 0 and noise > 0"));
        }
        if !(0.0..=1.0).contains(&self.shared) || (self.shared > 0.0 && self.features < 3) {
            return Err(MooError::invalid("shared must be in [0, 1] and needs at least 3 features when positive"));
        }
        if self.batch_size == Some(0) {
            return Err(MooError::invalid("batch size must be positive"));
        }
        match &self.heterogeneity {
            Heterogeneity::Rotation { angles_deg } => {
                if angles_deg.len() != self.clients {
                    return Err(MooError::dim("rotation angles", self.clients, angles_deg.len()));
                }
                if angles_deg.iter().any(|a| !a.is_finite()) {
                    return Err(MooError::NonFinite("rotation angles".into()));
                }
            }
            Heterogeneity::PartialClass { classes } => {
                if *classes == 0 || *classes > CLUSTERS {
                    return Err(MooError::invalid(format!(
                        "partial class count must be in 1..={CLUSTERS}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

/// One client's data, features stored row-major without the bias column.
#[derive(Debug, Clone, PartialEq)]
pub struct Client {
    features: usize,
    train_x: Vec<f64>,
    train_y: Vec<f64>,
    test_x: Vec<f64>,
    test_y: Vec<f64>,
}

impl Client {
    fn split(&self, split: Split) -> (&[f64], &[f64]) {
        match split {
            Split::Train => (&self.train_x, &self.train_y),
            Split::Test => (&self.test_x, &self.test_y),
        }
    }

    pub fn len(&self, split: Split) -> usize {
        self.split(split).1.len()
    }

    fn logit(&self, theta: &[f64], x: &[f64]) -> f64 {
        let (w, b) = theta.split_at(self.features);
        w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b[0]
    }

    /// Mean logistic loss plus `reg/2 ‖θ‖²` and its gradient over the given rows.
    fn loss_grad(&self, theta: &[f64], split: Split, rows: Option<&[usize]>, reg: f64, grad: Option<&mut [f64]>) -> f64 {
        let (xs, ys) = self.split(split);
        let k = self.features;
        let mut loss = 0.0;
        let mut g = grad;
        if let Some(g) = g.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        let mut visit = |r: usize| {
            let x = &xs[r * k..(r + 1) * k];
            let y = ys[r];
            let z = self.logit(theta, x);
            loss += softplus(z) - y * z;
            if let Some(g) = g.as_deref_mut() {
                let resid = sigmoid(z) - y;
                g[..k].iter_mut().zip(x).for_each(|(gi, xi)| *gi += resid * xi);
                g[k] += resid;
            }
        };
        let count = match rows {
            Some(rows) => {
                rows.iter().copied().for_each(&mut visit);
                rows.len()
            }
            None => {
                (0..ys.len()).for_each(&mut visit);
                ys.len()
            }
        };
        let n = count as f64;
        if let Some(g) = g {
            g.iter_mut().zip(theta).for_each(|(gi, t)| *gi = *gi / n + reg * t);
        }
        loss / n + 0.5 * reg * theta.iter().map(|t| t * t).sum::<f64>()
    }

    fn accuracy(&self, theta: &[f64], split: Split) -> f64 {
        let (xs, ys) = self.split(split);
        let k = self.features;
        let correct = ys
            .iter()
            .enumerate()
            .filter(|(r, y)| {
                let pred = if self.logit(theta, &xs[r * k..(r + 1) * k]) > 0.0 { 1.0 } else { 0.0 };
                pred == **y
            })
            .count();
        correct as f64 / ys.len() as f64
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// m clients, each objective is that client's regularized mean logistic loss
/// on its training split. θ holds the feature weights followed by a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct FedLogReg {
    spec: FedSpec,
    seed: u64,
    clients: Vec<Client>,
}

impl FedLogReg {
    /// Deterministic in `(spec, seed)`. Each client's data is split 80/20
    /// into train and test by a seeded shuffle.
    pub fn generate(spec: FedSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let k = spec.features;
        let n = spec.samples_per_client;
        let n_train = (0.8 * n as f64).round() as usize;

        // cluster centres for partial-class mode; label = cluster parity
        let centres: Vec<Vec<f64>> = {
            let mut rng = stream(seed, Purpose::Data, 0, u64::MAX);
            (0..CLUSTERS)
                .map(|_| {
                    let v = normal_vec(&mut rng, k, 1.0);
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                    v.into_iter().map(|x| spec.separation * x / norm).collect()
                })
                .collect()
        };

        let clients = (0..spec.clients)
            .map(|c| {
                let mut rng = stream(seed, Purpose::Data, 1, c as u64);
                let mut xs = Vec::with_capacity(n * k);
                let mut ys = Vec::with_capacity(n);
                match &spec.heterogeneity {
                    Heterogeneity::Rotation { angles_deg } => {
                        let (s, co) = angles_deg[c].to_radians().sin_cos();
                        let planar = spec.separation * (1.0 - spec.shared).sqrt();
                        let rest = if k > 2 { spec.separation * (spec.shared / (k - 2) as f64).sqrt() } else { 0.0 };
                        for _ in 0..n {
                            let y = if rng.random_bool(0.5) { 1.0 } else { 0.0 };
                            let sign = if y == 1.0 { 1.0 } else { -1.0 };
                            let mut mean = vec![sign * rest; k];
                            // in-plane part starts on e1 and is rotated towards e2
                            mean[0] = sign * planar * co;
                            mean[1] = sign * planar * s;
                            let noise = normal_vec(&mut rng, k, spec.noise);
                            xs.extend(mean.iter().zip(&noise).map(|(m, e)| m + e));
                            ys.push(y);
                        }
                    }
                    Heterogeneity::PartialClass { classes } => {
                        let mut ids: Vec<usize> = (0..CLUSTERS).collect();
                        ids.shuffle(&mut rng);
                        let chosen = &ids[..*classes];
                        for _ in 0..n {
                            let cl = chosen[rng.random_range(0..chosen.len())];
                            let noise = normal_vec(&mut rng, k, spec.noise);
                            xs.extend(centres[cl].iter().zip(&noise).map(|(m, e)| m + e));
                            ys.push((cl % 2) as f64);
                        }
                    }
                }
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut stream(seed, Purpose::Split, 0, c as u64));
                let gather = |rows: &[usize]| -> (Vec<f64>, Vec<f64>) {
                    let x = rows.iter().flat_map(|&r| xs[r * k..(r + 1) * k].iter().copied()).collect();
                    let y = rows.iter().map(|&r| ys[r]).collect();
                    (x, y)
                };
                let (train_x, train_y) = gather(&order[..n_train]);
                let (test_x, test_y) = gather(&order[n_train..]);
                Client {
                    features: k,
                    train_x,
                    train_y,
                    test_x,
                    test_y,
                }
            })
            .collect();

        Ok(FedLogReg { spec, seed, clients })
    }

    pub fn spec(&self) -> &FedSpec {
        &self.spec
    }

    pub fn clients(&self) -> &[Client] {
        &self.clients
    }

    pub fn num_clients(&self) -> usize {
        self.clients.len()
    }

    /// Client `i`'s loss on `split` and, when `grad` is given, its gradient.
    pub fn client_loss(&self, i: usize, theta: &[f64], split: Split, grad: Option<&mut [f64]>) -> f64 {
        self.clients[i].loss_grad(theta, split, None, self.spec.reg, grad)
    }

    pub fn client_accuracy(&self, i: usize, theta: &[f64], split: Split) -> f64 {
        self.clients[i].accuracy(theta, split)
    }

    /// Number of disjoint training minibatches of client `i` per epoch.
    pub fn batches_per_epoch(&self, i: usize) -> usize {
        let n = self.clients[i].train_y.len();
        match self.spec.batch_size {
            Some(b) if b < n => n.div_ceil(b),
            _ => 1,
        }
    }

    /// Row indices of the minibatch client `i` uses at step `counter`.
    ///
    /// Step `counter` belongs to epoch `counter / nb` and takes slot
    /// `counter % nb` of that epoch's seeded permutation, so one epoch of
    /// consecutive steps visits every training row exactly once.
    pub fn batch_rows(&self, i: usize, seed: u64, counter: u64) -> Vec<usize> {
        let n = self.clients[i].train_y.len();
        let nb = self.batches_per_epoch(i);
        if nb == 1 {
            return (0..n).collect();
        }
        let b = self.spec.batch_size.expect("nb > 1 implies a batch size");
        let epoch = counter / nb as u64;
        let slot = (counter % nb as u64) as usize;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut stream(seed ^ self.seed, Purpose::Batch, epoch, i as u64));
        perm[slot * b..((slot + 1) * b).min(n)].to_vec()
    }

    /// Minibatch loss and gradient of client `i` at step `counter`.
    pub fn client_batch_loss(&self, i: usize, theta: &[f64], seed: u64, counter: u64, grad: &mut [f64]) -> f64 {
        let rows = self.batch_rows(i, seed, counter);
        self.clients[i].loss_grad(theta, Split::Train, Some(&rows), self.spec.reg, Some(grad))
    }

    /// Writes `client_id,label,feature_1..feature_k` rows for the chosen split.
    pub fn export_csv<W: Write>(&self, out: W, split: Split) -> Result<()> {
        let io = |e: csv::Error| MooError::invalid(format!("csv export failed: {e}"));
        let mut wtr = csv::Writer::from_writer(out);
        let k = self.spec.features;
        let mut header = vec!["client_id".to_string(), "label".to_string()];
        header.extend((1..=k).map(|j| format!("feature_{j}")));
        wtr.write_record(&header).map_err(io)?;
        for (c, client) in self.clients.iter().enumerate() {
            let (xs, ys) = client.split(split);
            for (r, y) in ys.iter().enumerate() {
                let mut rec = vec![c.to_string(), format!("{}", *y as u8)];
                rec.extend(xs[r * k..(r + 1) * k].iter().map(|v| v.to_string()));
                wtr.write_record(&rec).map_err(io)?;
            }
        }
        wtr.flush().map_err(|e| MooError::invalid(format!("csv export failed: {e}")))?;
        Ok(())
    }
}

impl Problem for FedLogReg {
    fn name(&self) -> &str {
        "fedlogreg"
    }

    fn num_objectives(&self) -> usize {
        self.clients.len()
    }

    fn dim(&self) -> usize {
        self.spec.features + 1
    }

    fn objectives(&self, theta: &[f64]) -> Vec<f64> {
        (0..self.clients.len())
            .map(|i| self.client_loss(i, theta, Split::Train, None))
            .collect()
    }

    fn jacobian(&self, theta: &[f64]) -> Jacobian {
        let d = self.dim();
        let mut jac = Jacobian::zeros(self.clients.len(), d);
        for i in 0..self.clients.len() {
            self.client_loss(i, theta, Split::Train, Some(jac.row_mut(i)));
        }
        jac
    }

    /// Every client uses its minibatch for step `round`.
    fn sampled(&self, theta: &[f64], seed: u64, round: u64) -> (Vec<f64>, Jacobian) {
        let d = self.dim();
        let mut jac = Jacobian::zeros(self.clients.len(), d);
        let losses = (0..self.clients.len())
            .map(|i| self.client_batch_loss(i, theta, seed, round, jac.row_mut(i)))
            .collect();
        (losses, jac)
    }

    fn is_stochastic(&self) -> bool {
        self.spec.batch_size.is_some()
    }
}
