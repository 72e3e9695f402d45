#ifndef NERO_MODEL_HPP
#define NERO_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "nero/concept.hpp"
#include "nero/eigen_types.hpp"
#include "nero/kb.hpp"
#include "nero/refinement.hpp"
#include "nero/retrieval.hpp"

namespace nero {

/// Permutation-invariant F1 scorer
///
///   ŷ(E+, E−) = σ( φ(Σ_{x∈E+} ψ(x)) − φ(Σ_{x∈E−} ψ(x)) ),   φ(z) = Wz + b
///
/// with ψ an embedding table. Because φ is affine, b cancels in the
/// difference; it only matters for concept embeddings.
struct NeroModel {
  RowMatrix psi;  ///< |I| × m
  RowMatrix W;    ///< |T| × m
  Vector b;       ///< |T|
  std::vector<std::string> individual_names;
  std::vector<Concept> targets;

  std::size_t dim() const { return static_cast<std::size_t>(psi.cols()); }
  std::size_t num_targets() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t num_individuals() const { return static_cast<std::size_t>(psi.rows()); }

  /// Throws UnknownNameError naming the individual.
  IndividualId individual_index(const std::string& name) const;
};

/// ψ, W ~ U(−0.1, 0.1) from `seed`; b = 0.
NeroModel init_model(std::vector<std::string> individual_names, std::vector<Concept> targets, std::size_t dim,
                     std::uint64_t seed);

/// Scores every target. Throws Error when a set's universe differs from the
/// model's individual table.
Vector forward(const NeroModel& model, const IndividualSet& positives, const IndividualSet& negatives);
/// Index form; order and duplicates are irrelevant. Throws Error naming an
/// out-of-range index.
Vector forward(const NeroModel& model, std::span<const IndividualId> positives, std::span<const IndividualId> negatives);

/// φ(Σ_{x∈R(c)} ψ(x)). An empty retrieval yields b and a warning.
Vector embed_concept(const NeroModel& model, const RetrievalEngine& engine, const Concept& c);

struct TrainingConfig {
  std::size_t k = 10;                   ///< examples per side
  std::size_t problems_per_epoch = 50;  ///< N, regenerated every epoch
  std::size_t epochs = 200;
  std::size_t batch_size = 10;
  std::size_t dim = 32;  ///< m
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TrainingPoint {
  std::vector<IndividualId> positives;  ///< ascending
  std::vector<IndividualId> negatives;  ///< ascending
  Vector y;                             ///< F1 of every target
};

/// Draws C uniformly from the targets, k positives from R(C), k negatives
/// from I \ E+, all without replacement, then labels every target with its F1.
/// Targets with fewer than k instances are redrawn. Throws ConfigError when
/// |I| < 2k or no target has k instances.
TrainingPoint sample_training_point(const RetrievalEngine& engine, const TargetSpace& targets, std::size_t k,
                                    std::mt19937_64& rng);

struct Gradients {
  RowMatrix psi;
  RowMatrix W;
  Vector b;
};

struct LossAndGradients {
  double loss;
  Gradients grads;
};

/// Mean binary cross-entropy over points and targets (predictions clamped to
/// [1e−7, 1 − 1e−7]) and its analytic gradient. ∂L/∂b is identically zero.
/// Throws DivergenceError on a non-finite loss.
LossAndGradients loss_and_gradients(const NeroModel& model, std::span<const TrainingPoint> batch);
double batch_loss(const NeroModel& model, std::span<const TrainingPoint> batch);

struct TrainingLog {
  std::vector<double> epoch_loss;
};

/// Adam on ψ and W with freshly sampled points every epoch. Deterministic for
/// a given (engine, targets, config). Throws DivergenceError with the epoch.
NeroModel train(const RetrievalEngine& engine, const TargetSpace& targets, const TrainingConfig& cfg,
                TrainingLog* log = nullptr);

/// Binary container, little-endian:
///   "NEROMDL\0" | u32 version | u64 m | u64 |T| | u64 |I|
///   |I| × (u32 len, bytes)        individual names
///   |T| × (u32 len, bytes)        target manifest, ASCII grammar
///   f64[|I|·m] ψ | f64[|T|·m] W | f64[|T|] b     row-major
void save_model(const NeroModel& model, std::ostream& sink);
NeroModel load_model(std::istream& source);
void save_model_file(const NeroModel& model, const std::string& path);
NeroModel load_model_file(const std::string& path);

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Reorders ψ rows to `kb`'s individual order. Throws UnknownNameError naming
/// the first model individual, target concept or role that `kb` lacks, and
/// Error when `kb` has individuals the model never embedded.
NeroModel bind_to_kb(NeroModel model, const KnowledgeBase& kb);

}  // namespace nero

#endif  // NERO_MODEL_HPP
