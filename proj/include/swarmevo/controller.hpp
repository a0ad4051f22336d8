#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace swarmevo {

inline constexpr std::size_t kSensorDim = 9;
inline constexpr std::size_t kOutputDim = 2;
inline constexpr std::size_t kGenes = kOutputDim * kSensorDim;
inline constexpr double kGeneBound = 10.0;
inline constexpr double kReservoirBound = 2.0;

using SensorVector = std::array<double, kSensorDim>;
using HiddenMatrix = std::array<std::array<double, kSensorDim>, kSensorDim>;
using OutputLayer = std::array<std::array<double, kSensorDim>, kOutputDim>;

enum class Activation { softplus, relu };

/// How the forward-velocity neuron (tanh, in [-1, 1]) lands in [-1, 0].
enum class VelocityMapping {
  affine,  // v = (out - 1) / 2
  clamp,   // v = min(out, 0)
};

/// Fixed hidden layers, uniform in [-2, 2], zero biases. Shared by every
/// individual of one evolutionary run.
struct ReservoirWeights {
  std::uint64_t seed = 0;
  HiddenMatrix hidden1{};
  HiddenMatrix hidden2{};

  /// Fills hidden1 then hidden2, each row-major, from Rng(seed).
  static ReservoirWeights generate(std::uint64_t seed);
};

/// The 18 evolvable output weights, row-major rows of the output layer.
class Genotype {
 public:
  Genotype() { genes_.fill(0.0); }

  /// Throws std::invalid_argument on wrong length or out-of-bound genes.
  static Genotype from(std::span<const double> genes);
  /// Same as from() but clamps genes into [-10, 10] instead of rejecting.
  static Genotype clamped(std::span<const double> genes);

  std::span<const double, kGenes> genes() const { return genes_; }
  double operator[](std::size_t i) const { return genes_[i]; }
  static constexpr std::size_t size() { return kGenes; }

  bool operator==(const Genotype&) const = default;

 private:
  std::array<double, kGenes> genes_;
};

OutputLayer decode(const Genotype& genotype);
/// Throws std::invalid_argument unless genes.size() == 18.
OutputLayer decode(std::span<const double> genes);
Genotype encode(const OutputLayer& layer);

struct ControllerOutput {
  double w = 0.0;  // heading, [-1, 1]
  double v = 0.0;  // forward, [-1, 0]
};

struct ControllerOptions {
  Activation hidden = Activation::softplus;
  VelocityMapping velocity = VelocityMapping::affine;
};

double activate(Activation act, double x);

ControllerOutput forward(const ReservoirWeights& reservoir, const OutputLayer& out_layer,
                         const SensorVector& inputs, const ControllerOptions& options = {});

/// Shared reservoir plus one decoded output layer; what every robot of a
/// homogeneous swarm runs.
class Controller {
 public:
  Controller(std::shared_ptr<const ReservoirWeights> reservoir, const Genotype& genotype,
             ControllerOptions options = {});

  ControllerOutput operator()(const SensorVector& inputs) const {
    return forward(*reservoir_, layer_, inputs, options_);
  }

  const ReservoirWeights& reservoir() const { return *reservoir_; }
  const ControllerOptions& options() const { return options_; }
  const OutputLayer& layer() const { return layer_; }

 private:
  std::shared_ptr<const ReservoirWeights> reservoir_;
  OutputLayer layer_;
  ControllerOptions options_;
};

/// 18 whitespace-separated values, shortest round-trip form.
std::string format_genotype(const Genotype& genotype);
Genotype parse_genotype(std::string_view line);

std::string_view to_string(Activation act);
std::string_view to_string(VelocityMapping mapping);
Activation parse_activation(std::string_view name);
VelocityMapping parse_velocity_mapping(std::string_view name);

}  // namespace swarmevo
