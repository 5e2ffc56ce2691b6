#pragma once

// Desk-scale federated-learning pipeline: non-iid data for two stations,
// local vs FedAvg (+ personalization) training of a linear demand model,
// test RMSE, and the RMSE -> QoS mapping that feeds the station game.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "evcoop/model.hpp"

namespace evcoop::flsim {

/// Row-major sample block. `cluster` holds the latent cluster of each row
/// when known (-1 otherwise).
struct Samples {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<int> cluster;

  std::size_t size() const noexcept { return y.size(); }
  bool empty() const noexcept { return y.empty(); }
  std::span<const double> row(std::size_t k) const noexcept { return {x.data() + k * dim, dim}; }
  void push_back(std::span<const double> features, double target, int cluster_id = -1);
};

struct Dataset {
  Samples train;
  Samples test;
};

struct HeterogeneityConfig {
  double beta = 1.0;          // Dirichlet concentration; small = more skew
  std::size_t clusters = 10;  // latent clusters K
  std::size_t n_per_station = 3000;
  std::uint64_t seed = 0;
  std::size_t base_features = 4;
  double noise = 0.5;
  double train_fraction = 0.8;

  void validate() const;
};

struct StationData {
  Dataset data;
  std::vector<double> mixture;              // drawn cluster proportions
  std::vector<std::size_t> cluster_counts;  // realized, over train + test
  std::vector<double> empirical_mixture() const;
};

struct PartitionedData {
  PerStation<StationData> stations;
};

/// Synthetic non-iid data. Each of K clusters has its own linear relation
/// (standard-normal weights and intercept) shared by both stations; each
/// station draws its cluster mixture from Dirichlet(beta 1_K). The feature
/// vector places the base features and a constant in the block of the row's
/// cluster (dim = K (base_features + 1)), so a linear model can represent
/// every cluster and stations differ only in how often each cluster occurs.
/// Throws std::invalid_argument for beta <= 0.
PartitionedData generate_partitioned_data(const HeterogeneityConfig& cfg);

/// Dirichlet(alpha 1_k) draw that stays finite for very small alpha.
template <class Rng>
std::vector<double> dirichlet(Rng& rng, double alpha, std::size_t k);

/// Total-variation distance between two distributions of equal length.
double total_variation(std::span<const double> p, std::span<const double> q);

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double predict(std::span<const double> features) const noexcept;
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Full-batch gradient descent on mean squared error from a zero
/// initialization, in feature space standardized with the training split's
/// mean and variance. The returned model acts on raw features. One epoch is
/// one gradient step. Throws std::invalid_argument on empty data.
LinearModel train_local(const Samples& train, std::size_t epochs, double lr);

/// Observer hook: called after every aggregation with the two local models
/// that were averaged and the resulting global model (raw feature space).
using FedAvgObserver = std::function<void(std::size_t round, const LinearModel& local_a,
                                          const LinearModel& local_b, const LinearModel& global)>;

/// FedAvg with size-weighted parameter averaging, followed by local
/// personalization from the converged global model. Both stations share one
/// standardization computed from pooled training moments.
PerStation<LinearModel> train_fedavg(const Samples& train_a, const Samples& train_b,
                                     std::size_t rounds, std::size_t local_epochs, double lr,
                                     std::size_t personalize_epochs,
                                     const FedAvgObserver& observer = {});

/// Root mean squared prediction error. Throws std::invalid_argument on empty data.
double rmse(const LinearModel& model, const Samples& data);

/// q = q_max - theta * eps, floored at 0. Throws std::invalid_argument for eps < 0.
double qos_map(double eps, const ModelParams& params);

struct TrainConfig {
  std::size_t rounds = 50;
  std::size_t local_epochs = 5;
  std::size_t personalize_epochs = 5;
  double lr = 0.01;
  /// Epochs for local-only training; 0 matches the local compute of FL,
  /// rounds * local_epochs + personalize_epochs.
  std::size_t local_only_epochs = 0;

  std::size_t effective_local_only_epochs() const noexcept {
    return local_only_epochs ? local_only_epochs : rounds * local_epochs + personalize_epochs;
  }
};

struct FlRunResult {
  PerStation<double> rmse_local;
  PerStation<double> rmse_fl;
  PerStation<double> qos_local;
  PerStation<double> qos_fl;

  /// QoS profile for the station game (low = local, high = FL).
  QosProfile qos() const { return {qos_local, qos_fl}; }
};

/// Train both ways on already-partitioned data and evaluate on test splits.
FlRunResult run_experiment(const PartitionedData& data, const TrainConfig& train,
                           const ModelParams& params);

/// RMSEs averaged over `runs` independent data draws (seeds derived from
/// cfg.seed), with QoS mapped from the averages.
FlRunResult run_averaged(const HeterogeneityConfig& cfg, const TrainConfig& train,
                         const ModelParams& params, std::size_t runs);

/// Seed of the r-th run derived from a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t r) noexcept;

/// Re-sample a labelled pool (e.g. ingested sessions, cluster = start hour)
/// into two non-iid stations: cluster mixtures from Dirichlet(beta), rows
/// drawn with replacement within each cluster. Empty clusters are skipped.
PartitionedData partition_pool(const Samples& pool, const HeterogeneityConfig& cfg);

}  // namespace evcoop::flsim

#include "evcoop/detail/dirichlet.hpp"
