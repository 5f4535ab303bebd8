#include "predq/workload/prediction.hpp"

#include <sstream>

#include "predq/error.hpp"

namespace predq::workload {

std::string to_string(SizeClass c) { return c == SizeClass::kShort ? "S" : "L"; }

PredictionModel PredictionModel::exact() { return PredictionModel(Kind::kExact); }

PredictionModel PredictionModel::exponential_mean() { return PredictionModel(Kind::kExponentialMean); }

PredictionModel PredictionModel::uniform_multiplicative(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("uniform multiplicative alpha must lie in [0, 1]");
  }
  PredictionModel m(Kind::kUniformMultiplicative);
  m.alpha_ = alpha;
  return m;
}

PredictionModel PredictionModel::bounded_multiplicative(double beta, double alpha) {
  if (!(beta > 0.0 && beta <= 1.0 && alpha >= 1.0)) {
    throw ConfigError("bounded multiplicative error needs 0 < beta <= 1 <= alpha");
  }
  PredictionModel m(Kind::kBoundedMultiplicative);
  m.beta_ = beta;
  m.alpha_ = alpha;
  return m;
}

PredictionModel PredictionModel::one_bit(double threshold, PredictionModel base) {
  if (!(threshold > 0.0)) throw ConfigError("one-bit threshold must be > 0");
  if (base.kind() == Kind::kOneBit) throw ConfigError("one-bit base model cannot itself be one-bit");
  PredictionModel m(Kind::kOneBit);
  m.threshold_ = threshold;
  m.base_ = std::make_shared<const PredictionModel>(std::move(base));
  return m;
}

Prediction PredictionModel::predict(double x, engine::RngStream& rng) const {
  switch (kind_) {
    case Kind::kExact:
      return {x, std::nullopt};
    case Kind::kExponentialMean:
      return {rng.exponential(x), std::nullopt};
    case Kind::kUniformMultiplicative:
      if (alpha_ == 0.0) return {x, std::nullopt};
      return {rng.uniform((1.0 - alpha_) * x, (1.0 + alpha_) * x), std::nullopt};
    case Kind::kBoundedMultiplicative: {
      double y = rng.uniform(beta_ * x, alpha_ * x);
      // uniform() is open-interval in exact arithmetic; clamp rounding drift
      if (y < beta_ * x) y = beta_ * x;
      if (y > alpha_ * x) y = alpha_ * x;
      return {y, std::nullopt};
    }
    case Kind::kOneBit: {
      Prediction p = base_->predict(x, rng);
      p.class_bit = p.predicted_size <= threshold_ ? SizeClass::kShort : SizeClass::kLong;
      return p;
    }
  }
  throw LogicError("unknown prediction model kind");
}

std::string PredictionModel::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kExact:
      os << "exact";
      break;
    case Kind::kExponentialMean:
      os << "exponential_mean";
      break;
    case Kind::kUniformMultiplicative:
      os << "uniform_multiplicative(alpha=" << alpha_ << ")";
      break;
    case Kind::kBoundedMultiplicative:
      os << "bounded_multiplicative(beta=" << beta_ << ",alpha=" << alpha_ << ")";
      break;
    case Kind::kOneBit:
      os << "one_bit(T=" << threshold_ << "," << base_->name() << ")";
      break;
  }
  return os.str();
}

}  // namespace predq::workload
