#include "nero/model.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "nero/error.hpp"

namespace nero {

IndividualId NeroModel::individual_index(const std::string& name) const {
  auto it = std::find(individual_names.begin(), individual_names.end(), name);
  if (it == individual_names.end()) throw UnknownNameError("individual", name);
  return static_cast<IndividualId>(it - individual_names.begin());
}

NeroModel init_model(std::vector<std::string> individual_names, std::vector<Concept> targets, std::size_t dim,
                     std::uint64_t seed) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  if (targets.empty()) throw ConfigError("model needs at least one target concept");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  NeroModel m;
  const auto n = static_cast<Eigen::Index>(individual_names.size());
  const auto t = static_cast<Eigen::Index>(targets.size());
  const auto d = static_cast<Eigen::Index>(dim);
  m.psi = RowMatrix::NullaryExpr(n, d, [&]() { return unif(rng); });
  m.W = RowMatrix::NullaryExpr(t, d, [&]() { return unif(rng); });
  m.b = Vector::Zero(t);
  m.individual_names = std::move(individual_names);
  m.targets = std::move(targets);
  return m;
}

namespace {

void check_universe(const NeroModel& model, const IndividualSet& s) {
  if (s.universe() != model.num_individuals())
    throw Error("individual set over " + std::to_string(s.universe()) + " individuals does not match the model's " +
                std::to_string(model.num_individuals()));
}

IndividualSet to_set(const NeroModel& model, std::span<const IndividualId> ids) {
  IndividualSet s(model.num_individuals());
  for (auto id : ids) {
    if (id >= model.num_individuals()) throw Error("unknown individual index " + std::to_string(id));
    s.insert(id);
  }
  return s;
}

}  // namespace

Vector forward(const NeroModel& model, const IndividualSet& positives, const IndividualSet& negatives) {
  check_universe(model, positives);
  check_universe(model, negatives);
  const Vector delta = sum_rows(model.psi, positives) - sum_rows(model.psi, negatives);
  return sigmoid(model.W * delta);
}

Vector forward(const NeroModel& model, std::span<const IndividualId> positives, std::span<const IndividualId> negatives) {
  return forward(model, to_set(model, positives), to_set(model, negatives));
}

Vector embed_concept(const NeroModel& model, const RetrievalEngine& engine, const Concept& c) {
  const IndividualSet r = engine.retrieve(c);
  check_universe(model, r);
  if (r.empty()) {
    warn("concept '" + c.key() + "' has no instances; its embedding is the bias vector");
    return model.b;
  }
  return model.W * sum_rows(model.psi, r) + model.b;
}

void TrainingConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (problems_per_epoch < 1) throw ConfigError("problems_per_epoch must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (dim < 1) throw ConfigError("dim must be at least 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1)) throw ConfigError("Adam betas must lie in (0, 1)");
  if (!(epsilon > 0)) throw ConfigError("Adam epsilon must be positive");
}

namespace {

/// k distinct members of `pool`, sorted.
std::vector<IndividualId> sample_without_replacement(std::vector<IndividualId> pool, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

TrainingPoint sample_training_point(const RetrievalEngine& engine, const TargetSpace& targets, std::size_t k,
                                    std::mt19937_64& rng) {
  const auto n = engine.num_individuals();
  if (k < 1) throw ConfigError("k must be at least 1");
  if (n < 2 * k) throw ConfigError("need at least 2k = " + std::to_string(2 * k) + " individuals, have " + std::to_string(n));
  if (targets.size() == 0) throw ConfigError("empty target space");

  constexpr std::size_t kMaxRetries = 10000;
  std::uniform_int_distribution<std::size_t> pick_target(0, targets.size() - 1);
  std::size_t c = targets.size();
  for (std::size_t attempt = 0; attempt < kMaxRetries; ++attempt) {
    const auto candidate = pick_target(rng);
    if (targets.retrievals[candidate].count() >= k) {
      c = candidate;
      break;
    }
  }
  if (c == targets.size()) throw ConfigError("no target concept with at least k = " + std::to_string(k) + " instances");

  TrainingPoint p;
  p.positives = sample_without_replacement(targets.retrievals[c].to_vector(), k, rng);
  const IndividualSet pos = IndividualSet::from_range(n, p.positives);
  p.negatives = sample_without_replacement(pos.complement().to_vector(), k, rng);

  const LearningProblem lp{pos, IndividualSet::from_range(n, p.negatives)};
  p.y.resize(static_cast<Eigen::Index>(targets.size()));
  for (std::size_t j = 0; j < targets.size(); ++j) p.y(static_cast<Eigen::Index>(j)) = f1_score(targets.retrievals[j], lp);
  return p;
}

namespace {

constexpr double kClamp = 1e-7;

struct PointPass {
  Vector delta;  // s+ − s−
  Vector yhat;
};

PointPass point_forward(const NeroModel& model, const TrainingPoint& p) {
  Vector delta = Vector::Zero(model.psi.cols());
  for (auto x : p.positives) delta.noalias() += model.psi.row(x).transpose();
  Vector neg = Vector::Zero(model.psi.cols());
  for (auto x : p.negatives) neg.noalias() += model.psi.row(x).transpose();
  delta -= neg;
  Vector yhat = sigmoid(model.W * delta);
  return {std::move(delta), std::move(yhat)};
}

double point_loss(const Vector& yhat, const Vector& y) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double p = std::clamp(yhat(j), kClamp, 1.0 - kClamp);
    total -= y(j) * std::log(p) + (1.0 - y(j)) * std::log(1.0 - p);
  }
  return total;
}

void check_batch(const NeroModel& model, std::span<const TrainingPoint> batch) {
  if (batch.empty()) throw ConfigError("empty batch");
  for (const auto& p : batch) {
    if (p.y.size() != static_cast<Eigen::Index>(model.num_targets()))
      throw Error("training point label size does not match the target count");
    for (auto x : p.positives)
      if (x >= model.num_individuals()) throw Error("unknown individual index " + std::to_string(x));
    for (auto x : p.negatives)
      if (x >= model.num_individuals()) throw Error("unknown individual index " + std::to_string(x));
  }
}

}  // namespace

double batch_loss(const NeroModel& model, std::span<const TrainingPoint> batch) {
  check_batch(model, batch);
  double total = 0.0;
  for (const auto& p : batch) total += point_loss(point_forward(model, p).yhat, p.y);
  const double loss = total / (static_cast<double>(batch.size()) * static_cast<double>(model.num_targets()));
  if (!std::isfinite(loss)) throw DivergenceError("non-finite loss", 0);
  return loss;
}

LossAndGradients loss_and_gradients(const NeroModel& model, std::span<const TrainingPoint> batch) {
  check_batch(model, batch);
  const double scale = 1.0 / (static_cast<double>(batch.size()) * static_cast<double>(model.num_targets()));
  LossAndGradients out{0.0,
                       {RowMatrix::Zero(model.psi.rows(), model.psi.cols()), RowMatrix::Zero(model.W.rows(), model.W.cols()),
                        Vector::Zero(model.b.size())}};
  double total = 0.0;
  for (const auto& p : batch) {
    const PointPass pass = point_forward(model, p);
    total += point_loss(pass.yhat, p.y);
    const Vector g = (pass.yhat - p.y) * scale;
    out.grads.W.noalias() += g * pass.delta.transpose();
    const Vector back = model.W.transpose() * g;
    for (auto x : p.positives) out.grads.psi.row(x) += back.transpose();
    for (auto x : p.negatives) out.grads.psi.row(x) -= back.transpose();
  }
  out.loss = total * scale;
  if (!std::isfinite(out.loss)) throw DivergenceError("non-finite loss", 0);
  return out;
}

namespace {

template <typename Param>
struct AdamSlot {
  Param m;
  Param v;
};

template <typename Param>
void adam_step(Param& param, const Param& grad, AdamSlot<Param>& slot, const TrainingConfig& cfg, double bias1,
               double bias2) {
  slot.m = cfg.beta1 * slot.m + (1.0 - cfg.beta1) * grad;
  slot.v = cfg.beta2 * slot.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  param.array() -= cfg.learning_rate * (slot.m.array() / bias1) / ((slot.v.array() / bias2).sqrt() + cfg.epsilon);
}

}  // namespace

NeroModel train(const RetrievalEngine& engine, const TargetSpace& targets, const TrainingConfig& cfg, TrainingLog* log) {
  cfg.validate();
  NeroModel model = init_model(engine.kb().individuals.names(), targets.targets, cfg.dim, cfg.seed);
  if (log) log->epoch_loss.clear();
  if (cfg.epochs == 0) return model;

  // Sampling draws from its own stream so initialization and data stay
  // independent of each other's consumption.
  std::mt19937_64 rng(cfg.seed ^ 0x5deece66dULL);
  AdamSlot<RowMatrix> psi_slot{RowMatrix::Zero(model.psi.rows(), model.psi.cols()),
                               RowMatrix::Zero(model.psi.rows(), model.psi.cols())};
  AdamSlot<RowMatrix> w_slot{RowMatrix::Zero(model.W.rows(), model.W.cols()), RowMatrix::Zero(model.W.rows(), model.W.cols())};
  AdamSlot<Vector> b_slot{Vector::Zero(model.b.size()), Vector::Zero(model.b.size())};
  std::size_t step = 0;
  std::vector<double> losses;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<TrainingPoint> data;
    data.reserve(cfg.problems_per_epoch);
    for (std::size_t i = 0; i < cfg.problems_per_epoch; ++i) data.push_back(sample_training_point(engine, targets, cfg.k, rng));

    double epoch_total = 0.0;
    for (std::size_t start = 0; start < data.size(); start += cfg.batch_size) {
      const auto count = std::min(cfg.batch_size, data.size() - start);
      LossAndGradients lg{0.0, {}};
      try {
        lg = loss_and_gradients(model, std::span<const TrainingPoint>(data).subspan(start, count));
      } catch (const DivergenceError&) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1), epoch + 1);
      }
      epoch_total += lg.loss * static_cast<double>(count);
      ++step;
      const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      adam_step(model.psi, lg.grads.psi, psi_slot, cfg, bias1, bias2);
      adam_step(model.W, lg.grads.W, w_slot, cfg, bias1, bias2);
      adam_step(model.b, lg.grads.b, b_slot, cfg, bias1, bias2);
      if (!model.psi.allFinite() || !model.W.allFinite() || !model.b.allFinite())
        throw DivergenceError("non-finite parameters at epoch " + std::to_string(epoch + 1), epoch + 1);
    }
    losses.push_back(epoch_total / static_cast<double>(data.size()));
  }

  if (losses.size() >= 2 && !(losses.back() < losses.front()))
    warn("training loss did not decrease (first epoch " + std::to_string(losses.front()) + ", last epoch " +
         std::to_string(losses.back()) + ")");
  if (log) log->epoch_loss = std::move(losses);
  return model;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'E', 'R', 'O', 'M', 'D', 'L', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes{};
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename Derived>
void put_doubles(std::ostream& out, const Eigen::PlainObjectBase<Derived>& m) {
  // Row-major storage for RowMatrix and vectors alike.
  for (Eigen::Index i = 0; i < m.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(m.data()[i]));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("truncated model file");
  }
  std::uint32_t u32() {
    std::array<unsigned char, 4> b{};
    bytes(reinterpret_cast<char*>(b.data()), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t u64() {
    std::array<unsigned char, 8> b{};
    bytes(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::string string() {
    const auto len = u32();
    if (len > (1U << 20)) throw FormatError("implausible string length in model file");
    std::string s(len, '\0');
    bytes(s.data(), len);
    return s;
  }
  template <typename Derived>
  void doubles(Eigen::PlainObjectBase<Derived>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<double>(u64());
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(const NeroModel& model, std::ostream& sink) {
  sink.write(kMagic.data(), kMagic.size());
  put_u32(sink, kModelFormatVersion);
  put_u64(sink, model.dim());
  put_u64(sink, model.num_targets());
  put_u64(sink, model.num_individuals());
  for (const auto& name : model.individual_names) put_string(sink, name);
  for (const auto& c : model.targets) put_string(sink, render_concept(c, Notation::Ascii));
  put_doubles(sink, model.psi);
  put_doubles(sink, model.W);
  put_doubles(sink, model.b);
  if (!sink) throw Error("failed to write model");
}

NeroModel load_model(std::istream& source) {
  Reader r(source);
  std::array<char, 8> magic{};
  r.bytes(magic.data(), magic.size());
  if (magic != kMagic) throw FormatError("not a model file (bad magic)");
  const auto version = r.u32();
  if (version != kModelFormatVersion)
    throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  const auto m = r.u64();
  const auto t = r.u64();
  const auto n = r.u64();
  constexpr std::uint64_t kLimit = 1ULL << 28;
  if (m == 0 || t == 0 || m > kLimit || t > kLimit || n > kLimit || (n + t) * m > kLimit)
    throw FormatError("implausible model dimensions");

  NeroModel model;
  model.individual_names.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) model.individual_names.push_back(r.string());
  model.targets.reserve(t);
  for (std::uint64_t i = 0; i < t; ++i) {
    const auto text = r.string();
    try {
      model.targets.push_back(parse_concept(text));
    } catch (const ParseError& e) {
      throw FormatError("corrupt target manifest entry " + std::to_string(i) + ": " + e.what());
    }
  }
  model.psi.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  model.W.resize(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(m));
  model.b.resize(static_cast<Eigen::Index>(t));
  r.doubles(model.psi);
  r.doubles(model.W);
  r.doubles(model.b);
  return model;
}

void save_model_file(const NeroModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_model(model, out);
}

NeroModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path + "'");
  return load_model(in);
}

namespace {

void check_concept_names(const Concept& c, const KnowledgeBase& kb) {
  switch (c.kind()) {
    case ConceptKind::Atomic:
      kb.concept_index(c.name());
      return;
    case ConceptKind::Not:
      check_concept_names(c.operand(), kb);
      return;
    case ConceptKind::And:
    case ConceptKind::Or:
      check_concept_names(c.left(), kb);
      check_concept_names(c.right(), kb);
      return;
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      kb.role_index(c.name());
      check_concept_names(c.operand(), kb);
      return;
    default:
      return;
  }
}

}  // namespace

NeroModel bind_to_kb(NeroModel model, const KnowledgeBase& kb) {
  std::vector<IndividualId> kb_index(model.num_individuals());
  for (std::size_t row = 0; row < model.num_individuals(); ++row)
    kb_index[row] = kb.individual_index(model.individual_names[row]);
  if (kb.num_individuals() != model.num_individuals())
    throw Error("knowledge base has " + std::to_string(kb.num_individuals()) + " individuals but the model embeds " +
                std::to_string(model.num_individuals()));
  for (const auto& c : model.targets) check_concept_names(c, kb);

  RowMatrix psi(model.psi.rows(), model.psi.cols());
  for (std::size_t row = 0; row < model.num_individuals(); ++row) psi.row(kb_index[row]) = model.psi.row(static_cast<Eigen::Index>(row));
  model.psi = std::move(psi);
  model.individual_names = kb.individuals.names();
  return model;
}

}  // namespace nero
