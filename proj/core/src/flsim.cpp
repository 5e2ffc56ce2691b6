#include "evcoop/flsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace evcoop::flsim {

void Samples::push_back(std::span<const double> features, double target, int cluster_id) {
  if (dim == 0 && x.empty()) dim = features.size();
  if (features.size() != dim) throw std::invalid_argument("feature dimension mismatch");
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(target);
  cluster.push_back(cluster_id);
}

void HeterogeneityConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be > 0");
  if (clusters < 2) throw std::invalid_argument("clusters must be >= 2");
  if (n_per_station < clusters) throw std::invalid_argument("n_per_station must be >= clusters");
  if (base_features == 0) throw std::invalid_argument("base_features must be >= 1");
  if (!(noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
}

std::vector<double> StationData::empirical_mixture() const {
  const double total = static_cast<double>(
      std::accumulate(cluster_counts.begin(), cluster_counts.end(), std::size_t{0}));
  std::vector<double> out(cluster_counts.size(), 0.0);
  if (total == 0.0) return out;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(cluster_counts[k]) / total;
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in length");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += std::abs(p[k] - q[k]);
  return 0.5 * s;
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

// Shuffle rows of `all` and cut them into train/test.
Dataset split(const Samples& all, double train_fraction, std::mt19937_64& rng) {
  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(all.size()));
  Dataset d;
  d.train.dim = d.test.dim = all.dim;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Samples& dst = k < n_train ? d.train : d.test;
    const std::size_t r = order[k];
    dst.push_back(all.row(r), all.y[r], all.cluster[r]);
  }
  return d;
}

}  // namespace

PartitionedData generate_partitioned_data(const HeterogeneityConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng = seeded_engine(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t k_count = cfg.clusters;
  const std::size_t base = cfg.base_features;
  const std::size_t block = base + 1;

  // Ground truth per cluster: weights then intercept.
  std::vector<std::vector<double>> truth(k_count, std::vector<double>(block));
  for (auto& w : truth) {
    for (double& v : w) v = normal(rng);
  }

  PartitionedData out;
  for (StationId s : kStations) {
    StationData& st = out.stations[s];
    st.mixture = dirichlet(rng, cfg.beta, k_count);
    st.cluster_counts.assign(k_count, 0);
    std::discrete_distribution<std::size_t> pick(st.mixture.begin(), st.mixture.end());

    Samples all;
    all.dim = k_count * block;
    std::vector<double> features(all.dim);
    for (std::size_t n = 0; n < cfg.n_per_station; ++n) {
      const std::size_t c = pick(rng);
      ++st.cluster_counts[c];
      std::fill(features.begin(), features.end(), 0.0);
      double target = truth[c][base];
      for (std::size_t j = 0; j < base; ++j) {
        const double z = normal(rng);
        features[c * block + j] = z;
        target += truth[c][j] * z;
      }
      features[c * block + base] = 1.0;
      target += cfg.noise * normal(rng);
      all.push_back(features, target, static_cast<int>(c));
    }
    st.data = split(all, cfg.train_fraction, rng);
  }
  return out;
}

PartitionedData partition_pool(const Samples& pool, const HeterogeneityConfig& cfg) {
  cfg.validate();
  if (pool.empty()) throw std::invalid_argument("cannot partition an empty pool");

  std::vector<std::vector<std::size_t>> by_cluster(cfg.clusters);
  for (std::size_t r = 0; r < pool.size(); ++r) {
    const int c = pool.cluster[r];
    if (c < 0) throw std::invalid_argument("pool rows need cluster labels");
    by_cluster[static_cast<std::size_t>(c) % cfg.clusters].push_back(r);
  }

  std::mt19937_64 rng = seeded_engine(cfg.seed);
  PartitionedData out;
  for (StationId s : kStations) {
    StationData& st = out.stations[s];
    st.mixture = dirichlet(rng, cfg.beta, cfg.clusters);
    st.cluster_counts.assign(cfg.clusters, 0);
    std::vector<double> usable = st.mixture;
    for (std::size_t c = 0; c < cfg.clusters; ++c) {
      if (by_cluster[c].empty()) usable[c] = 0.0;
    }
    if (std::accumulate(usable.begin(), usable.end(), 0.0) <= 0.0) {
      // All mass fell on empty clusters: fall back to the pool's own frequencies.
      for (std::size_t c = 0; c < cfg.clusters; ++c) usable[c] = static_cast<double>(by_cluster[c].size());
    }
    std::discrete_distribution<std::size_t> pick(usable.begin(), usable.end());

    Samples all;
    all.dim = pool.dim;
    for (std::size_t n = 0; n < cfg.n_per_station; ++n) {
      const std::size_t c = pick(rng);
      const auto& rows = by_cluster[c];
      const std::size_t r = rows[std::uniform_int_distribution<std::size_t>(0, rows.size() - 1)(rng)];
      ++st.cluster_counts[c];
      all.push_back(pool.row(r), pool.y[r], static_cast<int>(c));
    }
    st.data = split(all, cfg.train_fraction, rng);
  }
  return out;
}

double LinearModel::predict(std::span<const double> features) const noexcept {
  double v = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) v += weights[j] * features[j];
  return v;
}

namespace {

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(std::initializer_list<const Samples*> parts) {
    const std::size_t d = (*parts.begin())->dim;
    Standardizer s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
    double n = 0.0;
    for (const Samples* p : parts) {
      for (std::size_t r = 0; r < p->size(); ++r) {
        auto row = p->row(r);
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
      }
      n += static_cast<double>(p->size());
    }
    for (double& m : s.mean) m /= n;
    for (const Samples* p : parts) {
      for (std::size_t r = 0; r < p->size(); ++r) {
        auto row = p->row(r);
        for (std::size_t j = 0; j < d; ++j) {
          const double c = row[j] - s.mean[j];
          s.scale[j] += c * c;
        }
      }
    }
    for (double& v : s.scale) {
      v = std::sqrt(v / n);
      if (!(v > 1e-12)) v = 1.0;  // constant column
    }
    return s;
  }

  std::vector<double> transform(const Samples& data) const {
    std::vector<double> z(data.x.size());
    const std::size_t d = mean.size();
    for (std::size_t r = 0; r < data.size(); ++r) {
      for (std::size_t j = 0; j < d; ++j) z[r * d + j] = (data.x[r * d + j] - mean[j]) / scale[j];
    }
    return z;
  }

  // Map a model on standardized features back to raw features.
  LinearModel to_raw(const LinearModel& m) const {
    LinearModel raw{std::vector<double>(m.weights.size()), m.bias};
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
      raw.weights[j] = m.weights[j] / scale[j];
      raw.bias -= m.weights[j] * mean[j] / scale[j];
    }
    return raw;
  }
};

// Standardized design matrix plus targets.
struct Problem {
  std::vector<double> z;
  std::span<const double> y;
  std::size_t dim;
};

void gradient_steps(const Problem& p, LinearModel& m, std::size_t steps, double lr) {
  const std::size_t n = p.y.size();
  const std::size_t d = p.dim;
  std::vector<double> grad(d);
  for (std::size_t s = 0; s < steps; ++s) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = p.z.data() + r * d;
      double pred = m.bias;
      for (std::size_t j = 0; j < d; ++j) pred += m.weights[j] * row[j];
      const double resid = pred - p.y[r];
      for (std::size_t j = 0; j < d; ++j) grad[j] += resid * row[j];
      grad_b += resid;
    }
    const double k = 2.0 * lr / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) m.weights[j] -= k * grad[j];
    m.bias -= k * grad_b;
  }
}

void require_nonempty(const Samples& s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string(what) + " is empty");
}

}  // namespace

LinearModel train_local(const Samples& train, std::size_t epochs, double lr) {
  require_nonempty(train, "training data");
  const Standardizer st = Standardizer::fit({&train});
  const Problem p{st.transform(train), train.y, train.dim};
  LinearModel m{std::vector<double>(train.dim, 0.0), 0.0};
  gradient_steps(p, m, epochs, lr);
  return st.to_raw(m);
}

PerStation<LinearModel> train_fedavg(const Samples& train_a, const Samples& train_b,
                                     std::size_t rounds, std::size_t local_epochs, double lr,
                                     std::size_t personalize_epochs,
                                     const FedAvgObserver& observer) {
  require_nonempty(train_a, "station A training data");
  require_nonempty(train_b, "station B training data");
  if (train_a.dim != train_b.dim) throw std::invalid_argument("stations disagree on feature dimension");

  const std::size_t d = train_a.dim;
  const Standardizer st = Standardizer::fit({&train_a, &train_b});
  const PerStation<Problem> prob{Problem{st.transform(train_a), train_a.y, d},
                                 Problem{st.transform(train_b), train_b.y, d}};
  const double n_a = static_cast<double>(train_a.size());
  const double n_b = static_cast<double>(train_b.size());
  const double alpha_a = n_a / (n_a + n_b);
  const double alpha_b = n_b / (n_a + n_b);

  LinearModel global{std::vector<double>(d, 0.0), 0.0};
  for (std::size_t round = 0; round < rounds; ++round) {
    PerStation<LinearModel> local{global, global};
    for (StationId s : kStations) gradient_steps(prob[s], local[s], local_epochs, lr);
    for (std::size_t j = 0; j < d; ++j) {
      global.weights[j] = alpha_a * local.a().weights[j] + alpha_b * local.b().weights[j];
    }
    global.bias = alpha_a * local.a().bias + alpha_b * local.b().bias;
    if (observer) observer(round, st.to_raw(local.a()), st.to_raw(local.b()), st.to_raw(global));
  }

  PerStation<LinearModel> out{global, global};
  for (StationId s : kStations) {
    gradient_steps(prob[s], out[s], personalize_epochs, lr);
    out[s] = st.to_raw(out[s]);
  }
  return out;
}

double rmse(const LinearModel& model, const Samples& data) {
  require_nonempty(data, "evaluation data");
  double sse = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double e = model.predict(data.row(r)) - data.y[r];
    sse += e * e;
  }
  return std::sqrt(sse / static_cast<double>(data.size()));
}

double qos_map(double eps, const ModelParams& params) {
  if (!(eps >= 0.0)) throw std::invalid_argument("RMSE must be >= 0");
  return std::max(params.q_max - params.theta * eps, 0.0);
}

FlRunResult run_experiment(const PartitionedData& data, const TrainConfig& train,
                           const ModelParams& params) {
  FlRunResult res;
  const auto& a = data.stations.a().data;
  const auto& b = data.stations.b().data;
  const PerStation<LinearModel> fl =
      train_fedavg(a.train, b.train, train.rounds, train.local_epochs, train.lr,
                   train.personalize_epochs);
  for (StationId s : kStations) {
    const Dataset& ds = data.stations[s].data;
    const LinearModel local = train_local(ds.train, train.effective_local_only_epochs(), train.lr);
    res.rmse_local[s] = rmse(local, ds.test);
    res.rmse_fl[s] = rmse(fl[s], ds.test);
    res.qos_local[s] = qos_map(res.rmse_local[s], params);
    res.qos_fl[s] = qos_map(res.rmse_fl[s], params);
  }
  return res;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t r) noexcept {
  // splitmix64 over (root, r)
  std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (r + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FlRunResult run_averaged(const HeterogeneityConfig& cfg, const TrainConfig& train,
                         const ModelParams& params, std::size_t runs) {
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  FlRunResult avg;
  for (std::size_t r = 0; r < runs; ++r) {
    HeterogeneityConfig c = cfg;
    c.seed = derive_seed(cfg.seed, r);
    const FlRunResult one = run_experiment(generate_partitioned_data(c), train, params);
    for (StationId s : kStations) {
      avg.rmse_local[s] += one.rmse_local[s] / static_cast<double>(runs);
      avg.rmse_fl[s] += one.rmse_fl[s] / static_cast<double>(runs);
    }
  }
  for (StationId s : kStations) {
    avg.qos_local[s] = qos_map(avg.rmse_local[s], params);
    avg.qos_fl[s] = qos_map(avg.rmse_fl[s], params);
  }
  return avg;
}

}  // namespace evcoop::flsim
