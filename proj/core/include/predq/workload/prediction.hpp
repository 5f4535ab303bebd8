#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "predq/engine/rng.hpp"

namespace predq::workload {

/// The 1-bit classification of a job.
enum class SizeClass : std::uint8_t { kShort = 0, kLong = 1 };

std::string to_string(SizeClass c);

struct Prediction {
  double predicted_size = 0.0;
  std::optional<SizeClass> class_bit;
};

/// Generative rule mapping a true size x to a predicted size y, optionally
/// thresholded into a short/long bit.
class PredictionModel {
 public:
  enum class Kind {
    kExact,
    kExponentialMean,        // y ~ Exp(mean x)
    kUniformMultiplicative,  // y ~ U[(1-alpha)x, (1+alpha)x]
    kBoundedMultiplicative,  // y ~ U[beta x, alpha x]
    kOneBit,                 // y from base; Short iff y <= threshold
  };

  static PredictionModel exact();
  static PredictionModel exponential_mean();
  static PredictionModel uniform_multiplicative(double alpha);
  static PredictionModel bounded_multiplicative(double beta, double alpha);
  static PredictionModel one_bit(double threshold, PredictionModel base);

  Prediction predict(double true_size, engine::RngStream& rng) const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double threshold() const { return threshold_; }
  /// Nested model of a OneBit predictor; null otherwise.
  const PredictionModel* base() const { return base_.get(); }

  std::string name() const;

 private:
  explicit PredictionModel(Kind kind) : kind_(kind) {}

  Kind kind_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double threshold_ = 0.0;
  std::shared_ptr<const PredictionModel> base_;
};

}  // namespace predq::workload
